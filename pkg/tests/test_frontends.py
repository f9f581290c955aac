import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iacrepair.frontends import ParseError, detect_tech, parse
from iacrepair.ir import (
    BoolLiteral,
    Concat,
    Conditional,
    Equals,
    IntLiteral,
    IRResource,
    NotEquals,
    StringLiteral,
    Sum,
    Tech,
    VariableAssignment,
    VariableReference,
    iter_statements,
    span_text,
)

PUPPET = """\
$mode = '0644'
if $::osfamily == 'Debian' {
  package { 'apache2': ensure => installed }
} elsif $::osfamily != 'RedHat' {
  package { 'httpd': ensure => latest }
} else {
  package { 'busybox': ensure => present }
}
file { "/etc/${mode}.conf":
  ensure => file,
  mode   => $mode,
  uid    => 10 + 2,
  force  => true,
}
"""

ANSIBLE = """\
- hosts: all
  vars:
    app: web
    port: 8080
  tasks:
    - name: conf
      file:
        path: "/etc/{{ app }}.conf"
        mode: 0644
        state: touch
      when: app == 'web'
    - service: {name: nginx, enabled: yes}
"""


def resources(script):
    return [s for s in iter_statements(script.statements) if isinstance(s, IRResource)]


def test_detect_tech():
    assert detect_tech("site.pp") is Tech.PUPPET
    assert detect_tech("a/b/play.YML") is Tech.ANSIBLE
    assert detect_tech("x.yaml") is Tech.ANSIBLE
    assert detect_tech("README.md") is None


def test_puppet_structure_and_spans():
    script = parse(PUPPET, "puppet")
    assign, cond, file_ = script.statements
    assert isinstance(assign, VariableAssignment) and assign.name == "mode"
    assert span_text(script, assign.value.span) == "'0644'"
    assert isinstance(cond, Conditional) and isinstance(cond.condition, Equals)
    nested = cond.else_branch[0]
    assert isinstance(nested, Conditional) and isinstance(nested.condition, NotEquals)
    assert [cond.cid, nested.cid] == [0, 1]
    assert [r.index for r in resources(script)] == [0, 1, 2, 3]
    assert isinstance(file_.title, Concat)
    assert span_text(script, file_.title.span) == '"/etc/${mode}.conf"'
    attrs = {a.name: a for a in file_.attributes}
    assert isinstance(attrs["mode"].value, VariableReference)
    assert isinstance(attrs["uid"].value, Sum)
    assert isinstance(attrs["force"].value, BoolLiteral)
    assert span_text(script, attrs["ensure"].name_span) == "ensure"
    assert span_text(script, attrs["ensure"].value.span) == "file"


def test_puppet_leading_zero_number_stays_string():
    script = parse("file { '/a': mode => 0644 }\n", "puppet")
    value = script.statements[0].attributes[0].value
    assert isinstance(value, StringLiteral) and value.value == "0644"


def test_puppet_multiple_bodies():
    src = "file {\n  '/a':\n    mode => '0600';\n  '/b':\n    mode => '0700';\n}\n"
    script = parse(src, "puppet")
    assert [r.title.value for r in script.statements] == ["/a", "/b"]
    assert script.statements[0].span != script.statements[1].span


@pytest.mark.parametrize("src,kind", [
    ("package { ['a', 'b']: ensure => installed }\n", "unsupported-array-title"),
    ("class foo { }\n", "unsupported"),
    ("package { 'a': ensure => [1, 2] }\n", "unsupported"),
    ("if $a =~ /x/ { }\n", "unsupported"),
    ("package { 'a' ensure => installed }\n", "syntax"),
    ("package { 'a': ensure => installed \n", "syntax"),
])
def test_puppet_errors_are_positioned(src, kind):
    with pytest.raises(ParseError) as info:
        parse(src, "puppet")
    assert info.value.kind == kind
    assert info.value.line >= 1 and info.value.column >= 1


def test_ansible_structure():
    script = parse(ANSIBLE, "ansible")
    app, port, cond, svc = script.statements
    assert isinstance(app, VariableAssignment) and app.value.value == "web"
    assert isinstance(port.value, IntLiteral)
    assert isinstance(cond, Conditional)
    assert isinstance(cond.condition, Equals)
    file_ = cond.then_branch[0]
    assert file_.type_name == "file" and file_.title is None and not file_.flow
    attrs = {a.name: a.value for a in file_.attributes}
    assert isinstance(attrs["path"], Concat)
    assert span_text(script, attrs["path"].span) == '"/etc/{{ app }}.conf"'
    assert isinstance(attrs["mode"], StringLiteral) and attrs["mode"].value == "0644"
    assert svc.flow
    assert isinstance(svc.attributes[1].value, BoolLiteral)


def test_ansible_task_list_and_insertion_point():
    src = "- name: a\n  apt:\n    name: git\n    state: present\n"
    script = parse(src, "ansible")
    assert len(script.statements) == 1
    point = script.insertion
    assert point.byte_offset == len(src.encode()) and point.indent == "" and point.attr_indent == "  "


def test_ansible_set_fact_becomes_assignment():
    src = "- set_fact:\n    owner: root\n- file:\n    path: /a\n    owner: '{{ owner }}'\n"
    script = parse(src, "ansible")
    assert isinstance(script.statements[0], VariableAssignment)
    assert isinstance(script.statements[1].attributes[1].value, VariableReference)


@pytest.mark.parametrize("src", [
    "- apt: {name: a}\n  loop: [1, 2]\n",
    "- block:\n    - apt: {name: a}\n",
    "- apt: name=git\n",
    "- hosts: all\n  roles: [web]\n",
    "- file: {path: /a}\n  when: a is defined\n",
])
def test_ansible_unsupported(src):
    with pytest.raises(ParseError) as info:
        parse(src, "ansible")
    assert info.value.kind == "unsupported"


def test_ansible_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse("- apt:\n    name: [unclosed\n", "ansible")
    assert info.value.kind == "syntax" and info.value.line >= 1


def test_corpus_parses(corpus_dir):
    files = sorted(p for p in corpus_dir.rglob("*") if detect_tech(p))
    assert len(files) >= 40
    techs = {detect_tech(p) for p in files}
    assert techs == {Tech.ANSIBLE, Tech.PUPPET}
    for path in files:
        parse(path.read_text(), detect_tech(path))


_puppetish = st.text(alphabet=st.sampled_from(list("$abc{}[]()'\"=>:,;-+ \n\t#/\\01=!ife")), max_size=80)
_yamlish = st.text(alphabet=st.sampled_from(list("- :{}[]'\"\n#abc01|>&*!%@`,?")), max_size=80)


@settings(max_examples=300, deadline=None)
@given(_puppetish)
def test_puppet_parser_is_total(text):
    try:
        parse(text, "puppet")
    except ParseError:
        pass


@settings(max_examples=300, deadline=None)
@given(_yamlish)
def test_ansible_parser_is_total(text):
    try:
        parse(text, "ansible")
    except ParseError:
        pass
