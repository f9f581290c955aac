import json

import pytest

from iacrepair.infer import infer_states
from iacrepair.normalize import CANONICAL_MODEL, closed_values
from iacrepair.repair import (
    AttributeValue,
    ConditionLiteral,
    Edit,
    MissingAttribute,
    MissingResource,
    RepairConfig,
    RepairSolution,
    RepairTimeout,
    VariableLiteral,
    apply_edits,
    classify_failure,
    collect_sites,
    repair,
    solution_from_json,
    solution_to_json,
    verify_solution,
)
from iacrepair.state import make_state, satisfies

from .conftest import norm
from .generators import small_instance
from .oracles import brute_force_min_cost


def test_collect_sites_counts_against_model():
    script = norm("file { '/a': ensure => file, mode => '0644' }\n")
    sites = collect_sites(script)
    values = [s for s in sites if isinstance(s, AttributeValue)]
    missing = [s for s in sites if isinstance(s, MissingAttribute)]
    assert {s.attribute for s in values} == {"state", "mode"}
    expected = set(CANONICAL_MODEL["file"].settable) - {"state", "mode"}
    assert {s.attribute for s in missing} == expected == {"owner", "group", "content", "target"}
    assert len(sites) == 2 + 4


def test_collect_sites_variables_conditions_and_empty():
    assert collect_sites(norm("")) == []
    sites = collect_sites(norm("$x = 'a'\n"))
    assert len(sites) == 1 and isinstance(sites[0], VariableLiteral)
    sites = collect_sites(norm("$y = $x\nif $x == 'a' { }\n"))
    assert [type(s) for s in sites] == [ConditionLiteral]


def test_collect_sites_skips_unsupported_types():
    assert collect_sites(norm("exec { 'run': command => '/bin/true' }\n")) == []


def test_file_absent_is_single_cost_one_edit():
    script = norm("file {'/a': ensure => file}\n")
    desired = make_state({"file:/a": {"state": "absent"}})
    sols = repair(script, desired)
    assert sols[0].total_cost == 1
    (edit,) = sols[0].edits
    assert isinstance(edit.site, AttributeValue) and edit.site.attribute == "state" and edit.new_value == "absent"
    assert [s for s in sols if s.total_cost == 1] == [sols[0]]


def test_zero_edit_when_already_satisfied():
    script = norm("package { 'git': ensure => installed }\n")
    sols = repair(script, make_state({"package:git": {"state": "present"}}))
    assert sols[0].total_cost == 0 and sols[0].edits == ()
    assert verify_solution(script, sols[0], make_state({"package:git": {"state": "present"}}))


def test_steam_inserts_two_packages(samples_dir):
    script = norm((samples_dir / "steam" / "steam.yml").read_text(), "ansible")
    desired = make_state({
        "package:steam": {"state": "present"},
        "package:libgl1-mesa-dri:i386": {"state": "present"},
        "package:libgl1:i386": {"state": "present"},
    })
    first = repair(script, desired)[0]
    inserted = sorted(e.site.resource_id for e in first.edits if isinstance(e.site, MissingResource))
    assert inserted == ["package:libgl1-mesa-dri:i386", "package:libgl1:i386"]
    assert first.total_cost == 4


def test_propagation_through_concat_and_variables():
    script = norm("$app = 'web'\nfile { '/etc/web.conf': owner => \"svc-${app}\" }\n")
    sols = repair(script, make_state({"file:/etc/web.conf": {"owner": "svc-db"}}))
    assert {(type(e.site).__name__, e.new_value) for s in sols if s.total_cost == 1 for e in s.edits} == {
        ("VariableLiteral", "db"), ("AttributeValue", "svc-db"),
    }
    assert isinstance(sols[0].edits[0].site, VariableLiteral)


def test_propagation_through_sum():
    script = norm("$base = 1000\nuser { 'u': uid => $base + 5 }\n")
    sols = repair(script, make_state({"user:u": {"uid": "2005"}}))
    assert any(e.new_value == "2000" and isinstance(e.site, VariableLiteral) for s in sols for e in s.edits)


def test_condition_flip_costs_one():
    script = norm("$env = 'prod'\nif $env == 'dev' {\n  package { 'strace': ensure => installed }\n}\n")
    sols = repair(script, make_state({"package:strace": {"state": "present"}}))
    cost_one = [s for s in sols if s.total_cost == 1]
    kinds = {type(s.edits[0].site) for s in cost_one}
    assert kinds == {VariableLiteral, ConditionLiteral}
    assert all(s.branch_decisions == ((0, "then"),) for s in cost_one)


def test_unknown_condition_is_free():
    script = norm("if $::os == 'a' {\n  package { 'x': ensure => installed }\n}\n")
    sols = repair(script, make_state({"package:x": {"state": "present"}}))
    assert sols[0].total_cost == 0 and sols[0].branch_decisions == ((0, "then"),)


def test_shared_variable_coherence():
    src = "$m = '0644'\nfile { '/a': mode => $m }\nfile { '/b': mode => $m }\n"
    script = norm(src)
    desired = make_state({"file:/a": {"mode": "0600"}, "file:/b": {"mode": "0755"}})
    sols = repair(script, desired)
    assert sols and all(verify_solution(script, s, desired) for s in sols)
    for sol in sols:
        assert not all(isinstance(e.site, VariableLiteral) for e in sol.edits)
    assert sols[0].total_cost == 2


def test_undefined_variable_needs_expression_edit():
    script = norm("file { '/a': owner => $app_owner }\n")
    desired = make_state({"file:/a": {"owner": "root"}})
    assert repair(script, desired)[0].total_cost == 1
    cfg = RepairConfig(allow_expression_edit=False)
    assert repair(script, desired, cfg) == []
    assert classify_failure(script, desired, cfg) == "undefined-variable"


def test_no_insert_and_invalid_values_fail():
    script = norm("package { 'git': ensure => installed }\n")
    missing = make_state({"package:vim": {"state": "present"}})
    assert repair(script, missing, RepairConfig(allow_resource_insertion=False)) == []
    assert classify_failure(script, missing, RepairConfig(allow_resource_insertion=False)) == "insertion-disabled"
    bogus = make_state({"package:git": {"state": "sideways"}})
    assert repair(script, bogus) == []
    assert classify_failure(script, bogus) == "invalid-value"


def test_closed_set_invariant_on_emitted_edits(corpus_dir):
    for path in sorted((corpus_dir / "tortoise").glob("*.pp"))[:5]:
        script = norm(path.read_text())
        (st, _), = infer_states(script)
        for res in st:
            for attr, values in ((a, closed_values(res.type, a)) for a in res.attributes):
                if not values:
                    continue
                for value in sorted(values):
                    desired = make_state({res.id: {attr: value}})
                    for sol in repair(script, desired, RepairConfig(max_solutions=3)):
                        for e in sol.edits:
                            if isinstance(e.site, (AttributeValue, MissingAttribute)) and e.site.attribute == attr:
                                assert e.new_value in values


def test_solutions_are_sorted_and_verified():
    src = "$v = '1.0'\npackage { 'a': ensure => installed, version => $v }\npackage { 'b': ensure => installed }\n"
    script = norm(src)
    desired = make_state({"package:a": {"version": "2.0"}, "package:b": {"state": "latest", "version": "2.0"}})
    sols = repair(script, desired)
    costs = [s.total_cost for s in sols]
    assert costs == sorted(costs) and costs[0] == 3
    assert all(verify_solution(script, s, desired) for s in sols)
    keys = [frozenset(s.edits) for s in sols]
    assert not any(a < b for a in keys for b in keys)


def test_verify_rejects_wrong_edit():
    script = norm("file {'/a': ensure => file}\n")
    site = collect_sites(script)[0]
    wrong = RepairSolution((Edit(site, "directory"),), 1)
    assert not verify_solution(script, wrong, make_state({"file:/a": {"state": "absent"}}))


def test_determinism():
    script = norm("$x = 'a'\nif $x == 'b' {\n  file { '/f': mode => '0644' }\n}\nfile { '/g': mode => $x }\n")
    desired = make_state({"file:/f": {"mode": "0600"}, "file:/g": {"mode": "0700"}})
    assert repair(script, desired) == repair(script, desired)


def test_timeout_carries_partial_solutions():
    body = "".join(f"if $::f{i} == 'x' {{\n  package {{ 'p{i}': ensure => installed }}\n}}\n" for i in range(6))
    script = norm(body)
    desired = make_state({f"package:q{i}": {"state": "latest", "version": "1.0.0"} for i in range(6)})
    with pytest.raises(RepairTimeout) as info:
        repair(script, desired, RepairConfig(timeout_seconds=0.001))
    assert isinstance(info.value.solutions, list)


def test_config_must_be_positive():
    with pytest.raises(ValueError):
        RepairConfig(max_solutions=0)
    with pytest.raises(ValueError):
        RepairConfig(timeout_seconds=-1)


def test_apply_edits_inserts_resources():
    script = norm("package { 'a': ensure => installed }\n")
    edits = [Edit(MissingResource("user:bob"), "user:bob"), Edit(MissingAttribute(-1, "user:bob", "uid"), "7")]
    (st, _), = infer_states(apply_edits(script, edits))
    assert st.get("user:bob").attributes == {"uid": "7"}


def test_solution_json_round_trip():
    script = norm("$x = 'a'\nfile { '/g': mode => $x }\n")
    sol = repair(script, make_state({"file:/g": {"mode": "0700", "owner": "root"}}))[0]
    again = solution_from_json(json.loads(json.dumps(solution_to_json(sol))))
    assert again == sol


def test_minimality_against_brute_force_sample():
    checked = 0
    for seed in range(120):
        inst = small_instance(seed)
        if inst is None:
            continue
        _, script, desired = inst
        sols = repair(script, make_state(desired), RepairConfig(max_cost=4))
        assert (sols[0].total_cost if sols else None) == brute_force_min_cost(script, desired, 4), seed
        checked += 1
    assert checked >= 50


def test_every_solution_satisfies_through_inference():
    inst = [small_instance(s) for s in range(40)]
    for item in filter(None, inst):
        _, script, desired = item
        for sol in repair(script, make_state(desired)):
            states = infer_states(apply_edits(script, sol.edits))
            assert any(satisfies(st, make_state(desired)) for st, _ in states)
