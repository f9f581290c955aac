import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iacrepair.state import (
    MISSING_ATTRIBUTE,
    MISSING_RESOURCE,
    ResourceState,
    StateFormatError,
    SystemState,
    diff,
    make_state,
    parse_state,
    satisfies,
    split_id,
)


def test_split_id_uses_first_colon():
    assert split_id("package:libgl1:i386") == ("package", "libgl1:i386")
    with pytest.raises(StateFormatError):
        split_id("nocolon")
    with pytest.raises(StateFormatError):
        split_id(":x")


def test_json_round_trip():
    state = make_state({"file:/a": {"mode": "0644"}, "package:git": {}})
    again = parse_state(state.dumps())
    assert again == state
    assert again.get("package:git").attributes == {}


@pytest.mark.parametrize("text", [
    '{"id": "file:/a"}',
    '[{"id": "file:/a", "attributes": {"mode": 644}}]',
    '[{"id": 3}]',
    '[{"id": "file:/a", "extra": 1}]',
    '[{"id": "file:/a"}, {"id": "file:/a"}]',
    "not json",
])
def test_parse_state_rejects(text):
    with pytest.raises(StateFormatError):
        parse_state(text)


def test_subset_satisfaction():
    actual = make_state({"file:/a": {"state": "present", "mode": "0644"}, "package:git": {"state": "present"}})
    assert satisfies(actual, make_state({"file:/a": {"mode": "0644"}}))
    assert satisfies(actual, make_state({"package:git": {}}))
    assert not satisfies(actual, make_state({"file:/a": {"mode": "0600"}}))
    assert not satisfies(actual, make_state({"file:/a": {"owner": "root"}}))
    assert not satisfies(actual, make_state({"package:vim": {}}))


def test_diff_reports_in_desired_order():
    actual = make_state({"file:/a": {"mode": "0644"}})
    desired = make_state({"file:/a": {"mode": "0600", "owner": "root"}, "package:git": {"state": "present"}})
    assert diff(actual, desired) == [
        ("file:/a", "mode", "0600", "0644"),
        ("file:/a", "owner", "root", MISSING_ATTRIBUTE),
        ("package:git", None, None, MISSING_RESOURCE),
    ]


_ids = st.sampled_from(["file:/a", "file:/b", "package:git", "user:bob"])
_attrs = st.dictionaries(st.sampled_from(["state", "mode", "owner"]), st.sampled_from(["x", "y", "0644"]), max_size=3)
_states = st.dictionaries(_ids, _attrs, max_size=4).map(make_state)


@given(_states)
def test_satisfies_is_reflexive(state):
    assert satisfies(state, state)
    assert satisfies(state, SystemState())
    assert diff(state, state) == []


@given(_states, _states)
def test_dropping_desired_attributes_keeps_satisfaction(actual, desired):
    if satisfies(actual, desired):
        weaker = SystemState(tuple(ResourceState(r.id, dict(list(r.attributes.items())[:1])) for r in desired))
        assert satisfies(actual, weaker)
    assert satisfies(actual, desired) == (diff(actual, desired) == [])


@given(_states)
def test_key_ignores_order(state):
    reversed_state = SystemState(tuple(reversed(state.resources)))
    assert reversed_state.key() == state.key()
    assert json.loads(state.dumps()) == state.to_json()
