import pytest

from iacrepair.frontends import parse
from iacrepair.infer import infer_states
from iacrepair.ir import IRResource, Tech, VariableReference, iter_statements, span_text
from iacrepair.normalize import (
    CANONICAL_MODEL,
    DB_ENV_VAR,
    DbError,
    bundled_db_path,
    closed_values,
    default_db,
    denormalize,
    load_db,
    normalize_script,
)


def _scope(rule):
    if rule.kind == "type":
        return (rule.tech,)
    if rule.kind == "attr":
        return (rule.tech, rule.ctype)
    return (rule.tech, rule.ctype, rule.attr)


def _normalize_one(db, rule, raw):
    if rule.kind == "type":
        return db.canonical_type(rule.tech, raw)
    if rule.kind == "attr":
        return db.canonical_attr(rule.tech, rule.ctype, raw)
    return db.canonical_value(rule.tech, rule.ctype, rule.attr, raw)


def test_every_invertible_rule_round_trips():
    db = default_db()
    invertible = [r for r in db.rules if not r.alias]
    assert invertible
    for rule in invertible:
        canonical = _normalize_one(db, rule, rule.raw)
        assert canonical == rule.canonical
        assert denormalize(canonical, _scope(rule), db) == rule.raw


def test_alias_rules_round_trip_up_to_canonical_equivalence():
    db = default_db()
    for rule in (r for r in db.rules if r.alias):
        canonical = _normalize_one(db, rule, rule.raw)
        assert canonical == rule.canonical
        back = denormalize(canonical, _scope(rule), db)
        assert _normalize_one(db, rule, back) == canonical


def test_normalization_is_idempotent():
    db = default_db()
    for rule in db.rules:
        once = _normalize_one(db, rule, rule.raw)
        assert _normalize_one(db, rule, once) == once


def test_value_rules_target_canonical_attributes():
    for rule in default_db().rules:
        if rule.kind == "value":
            assert CANONICAL_MODEL[rule.ctype].attribute(rule.attr) is not None


def test_unmapped_names_pass_through():
    db = default_db()
    assert db.canonical_attr("puppet", "file", "owner") == "owner"
    assert denormalize("owner", ("puppet", "file"), db) == "owner"
    assert denormalize("package", ("ansible",), db) == "package"


@pytest.mark.parametrize("text,needle", [
    ("puppet|file|attr|ensure|state\npuppet|file|attr|ensure|status\n", "duplicate"),
    ("puppet|file|attr|ensure|state\npuppet|file|attr|status|state\n", "non-invertible"),
    ("puppet|file|value:colour|red|blue\n", "unknown to the canonical"),
    ("puppet|file|attr|ensure\n", "expected"),
    ("chef|file|attr|ensure|state\n", "unknown technology"),
    ("puppet|file|rename|a|b\n", "unknown rule kind"),
    ("puppet|file|attr|a|b\npuppet|file|attr|b|c\n", "rewrites again"),
])
def test_load_db_rejects_bad_tables(text, needle):
    with pytest.raises(DbError, match=needle):
        load_db(text)


def test_alias_rows_may_converge():
    db = load_db("puppet|package|value:state|installed|present\npuppet|package|value-alias:state|present_ok|present\n")
    assert db.canonical_value("puppet", "package", "state", "present_ok") == "present"
    assert denormalize("present", ("puppet", "package", "state"), db) == "installed"


def test_env_var_overrides_db(tmp_path, monkeypatch):
    path = tmp_path / "custom.db"
    path.write_text("puppet|package|attr|ensure|state\n")
    monkeypatch.setenv(DB_ENV_VAR, str(path))
    assert bundled_db_path() == str(path)
    db = default_db()
    assert len(db.rules) == 1


def test_normalize_script_keeps_spans_and_attaches_value_maps():
    src = "$e = 'installed'\npackage { 'git': ensure => installed }\npackage { 'vim': ensure => $e }\n"
    raw = parse(src, "puppet")
    script = normalize_script(raw)
    git, vim = [s for s in iter_statements(script.statements) if isinstance(s, IRResource)]
    attr = git.attributes[0]
    assert attr.name == "state" and attr.value.value == "present"
    assert span_text(script, attr.value.span) == "installed"
    assert span_text(script, attr.name_span) == "ensure"
    assert isinstance(vim.attributes[0].value, VariableReference)
    assert vim.attributes[0].value_map.to_canonical("installed") == "present"
    states = infer_states(script)
    assert states[0][0].get("package:vim").attributes["state"] == "present"


def test_ansible_types_and_aliases():
    src = "- apt: {name: git, state: present}\n- file: {dest: /a, state: touch}\n- systemd: {name: x, enabled: yes}\n"
    script = normalize_script(parse(src, "ansible"))
    types = [s.type_name for s in script.statements]
    assert types == ["package", "file", "service"]
    (st, _), = infer_states(script)
    assert st.get("file:/a").attributes["state"] == "present"
    assert st.get("service:x").attributes["enabled"] == "true"


def test_closed_values():
    assert closed_values("service", "state") == {"started", "stopped"}
    assert closed_values("file", "mode") is None
    assert closed_values("exec", "command") is None


def test_cross_technology_convergence(samples_dir):
    pp = samples_dir / "convergence" / "web.pp"
    yml = samples_dir / "convergence" / "web.yml"
    a = infer_states(normalize_script(parse(pp.read_text(), Tech.PUPPET)))
    b = infer_states(normalize_script(parse(yml.read_text(), Tech.ANSIBLE)))
    assert [s.key() for s, _ in a] == [s.key() for s, _ in b]
    assert len(a) == 1 and len(a[0][0]) == 4
