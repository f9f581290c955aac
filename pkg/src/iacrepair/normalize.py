"""Data-driven normalization of resource types, attribute names and values.

The rule set lives in ``data/normalization.db`` (see the header of that file
for the row format). ``INFRAFIX_NORMALIZATION_DB`` points at a replacement.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Mapping, Optional, Union

from .ir import (
    BoolLiteral,
    Conditional,
    IntLiteral,
    IRAttribute,
    IRResource,
    IRScript,
    IRStatement,
    StringLiteral,
    Tech,
    ValueMap,
    render_literal,
)

DB_ENV_VAR = "INFRAFIX_NORMALIZATION_DB"


@dataclass(frozen=True)
class AttributeModel:
    name: str
    values: Optional[frozenset[str]] = None  # closed value set, None if open


@dataclass(frozen=True)
class TypeModel:
    name: str
    identifying: str
    attributes: tuple[AttributeModel, ...]

    def attribute(self, name: str) -> Optional[AttributeModel]:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None

    @property
    def settable(self) -> tuple[str, ...]:
        """Canonical attributes other than the identifying one."""
        return tuple(a.name for a in self.attributes if a.name != self.identifying)


def _closed(*values: str) -> frozenset[str]:
    return frozenset(values)


CANONICAL_MODEL: Mapping[str, TypeModel] = MappingProxyType({
    "file": TypeModel("file", "path", (
        AttributeModel("path"),
        AttributeModel("state", _closed("present", "absent", "directory", "link")),
        AttributeModel("owner"),
        AttributeModel("group"),
        AttributeModel("mode"),
        AttributeModel("content"),
        AttributeModel("target"),
    )),
    "package": TypeModel("package", "name", (
        AttributeModel("name"),
        AttributeModel("state", _closed("present", "absent", "latest")),
        AttributeModel("version"),
    )),
    "service": TypeModel("service", "name", (
        AttributeModel("name"),
        AttributeModel("state", _closed("started", "stopped")),
        AttributeModel("enabled", _closed("true", "false")),
    )),
    "user": TypeModel("user", "name", (
        AttributeModel("name"),
        AttributeModel("state", _closed("present", "absent")),
        AttributeModel("uid"),
        AttributeModel("gid"),
        AttributeModel("home"),
        AttributeModel("shell"),
    )),
})

SUPPORTED_TYPES = frozenset(CANONICAL_MODEL)


def closed_values(ctype: str, attr: str) -> Optional[frozenset[str]]:
    model = CANONICAL_MODEL.get(ctype)
    if model is None:
        return None
    am = model.attribute(attr)
    return am.values if am else None


class DbError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    tech: str
    ctype: str
    kind: str  # "type", "attr" or "value"
    attr: Optional[str]
    raw: str
    canonical: str
    alias: bool
    line: int

    def __str__(self) -> str:
        kind = self.kind + ("-alias" if self.alias else "")
        if self.attr:
            kind += ":" + self.attr
        return f"{self.tech}|{self.ctype}|{kind}|{self.raw}|{self.canonical}"


@dataclass(frozen=True)
class NormalizationDb:
    rules: tuple[Rule, ...] = ()
    type_rules: Mapping[tuple[str, str], str] = field(default_factory=dict)
    attr_rules: Mapping[tuple[str, str, str], str] = field(default_factory=dict)
    value_rules: Mapping[tuple[str, str, str, str], str] = field(default_factory=dict)
    identifying_attr: Mapping[str, str] = field(default_factory=dict)
    type_inverse: Mapping[tuple[str, str], str] = field(default_factory=dict)
    attr_inverse: Mapping[tuple[str, str, str], str] = field(default_factory=dict)
    value_inverse: Mapping[tuple[str, str, str, str], str] = field(default_factory=dict)

    def canonical_type(self, tech: Union[Tech, str], raw: str) -> str:
        return self.type_rules.get((Tech(tech).value, raw), raw)

    def canonical_attr(self, tech: Union[Tech, str], ctype: str, raw: str) -> str:
        return self.attr_rules.get((Tech(tech).value, ctype, raw), raw)

    def canonical_value(self, tech: Union[Tech, str], ctype: str, cattr: str, raw: str) -> str:
        return self.value_rules.get((Tech(tech).value, ctype, cattr, raw), raw)

    def value_map(self, tech: Union[Tech, str], ctype: str, cattr: str) -> Optional[ValueMap]:
        t = Tech(tech).value
        fwd = tuple(sorted((k[3], v) for k, v in self.value_rules.items() if k[:3] == (t, ctype, cattr)))
        if not fwd:
            return None
        back = tuple(sorted((k[3], v) for k, v in self.value_inverse.items() if k[:3] == (t, ctype, cattr)))
        return ValueMap(fwd, back)


def _parse_kind(kind: str) -> tuple[str, Optional[str], bool]:
    head, _, attr = kind.partition(":")
    alias = head.endswith("-alias")
    if alias:
        head = head[: -len("-alias")]
    if head not in ("type", "attr", "value"):
        raise ValueError(kind)
    if (head == "value") != bool(attr):
        raise ValueError(kind)
    return head, attr or None, alias


def load_db(source: str) -> NormalizationDb:
    """Parse and validate rules in the pipe-separated DB format."""
    rules: list[Rule] = []
    for lineno, line in enumerate(source.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        fields = [f.strip() for f in text.split("|")]
        if len(fields) != 5 or not all(fields[:4]):
            raise DbError(f"line {lineno}: expected tech|canonical_type|kind|raw|canonical: {line.strip()!r}")
        tech, ctype, kind, raw, canonical = fields
        try:
            Tech(tech)
        except ValueError:
            raise DbError(f"line {lineno}: unknown technology {tech!r}") from None
        try:
            head, attr, alias = _parse_kind(kind)
        except ValueError:
            raise DbError(f"line {lineno}: unknown rule kind {kind!r}") from None
        if head == "type":
            canonical = canonical or ctype
            if canonical != ctype:
                raise DbError(f"line {lineno}: type rule must map to its canonical type {ctype!r}")
        elif not canonical:
            raise DbError(f"line {lineno}: empty canonical name in {line.strip()!r}")
        rules.append(Rule(tech, ctype, head, attr, raw, canonical, alias, lineno))
    return _build(rules)


def _build(rules: list[Rule]) -> NormalizationDb:
    forward: dict[tuple, str] = {}
    owner: dict[tuple, Rule] = {}
    inverse: dict[tuple, str] = {}
    inverse_owner: dict[tuple, Rule] = {}
    for rule in rules:
        if rule.kind == "type":
            scope: tuple = (rule.tech,)
        elif rule.kind == "attr":
            scope = (rule.tech, rule.ctype)
        else:
            scope = (rule.tech, rule.ctype, rule.attr)
            model = CANONICAL_MODEL.get(rule.ctype)
            if model is not None and model.attribute(rule.attr or "") is None:
                raise DbError(f"rule {rule} (line {rule.line}) targets attribute {rule.attr!r} "
                              f"unknown to the canonical {rule.ctype!r} model")
        key = (rule.kind, *scope, rule.raw)
        if key in forward:
            raise DbError(f"duplicate rule {rule} (line {rule.line}); "
                          f"{rule.raw!r} already mapped by line {owner[key].line}")
        forward[key] = rule.canonical
        owner[key] = rule
        if not rule.alias:
            ikey = (rule.kind, *scope, rule.canonical)
            if ikey in inverse:
                raise DbError(f"non-invertible rule {rule} (line {rule.line}): "
                              f"{rule.canonical!r} already produced by line {inverse_owner[ikey].line}")
            inverse[ikey] = rule.raw
            inverse_owner[ikey] = rule
    # A canonical name that is also a raw spelling in the same scope would make
    # normalization non-idempotent.
    for key, canonical in forward.items():
        probe = key[:-1] + (canonical,)
        if probe in forward and forward[probe] != canonical:
            rule = owner[key]
            raise DbError(f"rule {rule} (line {rule.line}) produces {canonical!r}, "
                          f"which line {owner[probe].line} rewrites again")

    type_rules = {k[1:]: v for k, v in forward.items() if k[0] == "type"}
    attr_rules = {k[1:]: v for k, v in forward.items() if k[0] == "attr"}
    value_rules = {k[1:]: v for k, v in forward.items() if k[0] == "value"}
    type_inv = {k[1:]: v for k, v in inverse.items() if k[0] == "type"}
    attr_inv = {k[1:]: v for k, v in inverse.items() if k[0] == "attr"}
    value_inv = {k[1:]: v for k, v in inverse.items() if k[0] == "value"}
    return NormalizationDb(
        tuple(rules),
        MappingProxyType(type_rules),
        MappingProxyType(attr_rules),
        MappingProxyType(value_rules),
        MappingProxyType({name: m.identifying for name, m in CANONICAL_MODEL.items()}),
        MappingProxyType(type_inv),
        MappingProxyType(attr_inv),
        MappingProxyType(value_inv),
    )


def bundled_db_path() -> str:
    override = os.environ.get(DB_ENV_VAR)
    if override:
        return override
    return str(resources.files("iacrepair") / "data" / "normalization.db")


@lru_cache(maxsize=8)
def _load_path(path: str, mtime: float) -> NormalizationDb:
    with open(path, encoding="utf-8") as fh:
        return load_db(fh.read())


def default_db() -> NormalizationDb:
    path = bundled_db_path()
    return _load_path(path, os.path.getmtime(path))


def _normalize_resource(res: IRResource, tech: Tech, db: NormalizationDb) -> IRResource:
    ctype = db.canonical_type(tech, res.type_name)
    attrs: list[IRAttribute] = []
    for attr in res.attributes:
        name = db.canonical_attr(tech, ctype, attr.name)
        value = attr.value
        if isinstance(value, (StringLiteral, BoolLiteral, IntLiteral)) and not getattr(value, "fragment", False):
            rendered = render_literal(value)
            mapped = db.canonical_value(tech, ctype, name, rendered)
            if mapped != rendered:
                quote = value.quote if isinstance(value, StringLiteral) else ""
                value = StringLiteral(mapped, value.span, quote)
        attrs.append(replace(attr, name=name, value=value, value_map=db.value_map(tech, ctype, name)))
    # Last writer wins if two raw spellings collapse onto one canonical name.
    seen: set[str] = set()
    unique: list[IRAttribute] = []
    for attr in reversed(attrs):
        if attr.name not in seen:
            seen.add(attr.name)
            unique.append(attr)
    unique.reverse()
    return replace(res, type_name=ctype, attributes=tuple(unique))


def _normalize_statements(stmts: tuple[IRStatement, ...], tech: Tech, db: NormalizationDb) -> tuple[IRStatement, ...]:
    out: list[IRStatement] = []
    for stmt in stmts:
        if isinstance(stmt, IRResource):
            out.append(_normalize_resource(stmt, tech, db))
        elif isinstance(stmt, Conditional):
            out.append(replace(
                stmt,
                then_branch=_normalize_statements(stmt.then_branch, tech, db),
                else_branch=_normalize_statements(stmt.else_branch, tech, db),
            ))
        else:
            out.append(stmt)
    return tuple(out)


def normalize_script(script: IRScript, db: Optional[NormalizationDb] = None) -> IRScript:
    """Rewrite types, attribute names and reserved literal values to canonical form.

    Spans are left untouched so every node still points at the raw text.
    Non-literal attribute values get a :class:`ValueMap` so that values
    computed at evaluation time are canonicalized the same way.
    """
    db = db or default_db()
    return replace(script, statements=_normalize_statements(script.statements, script.tech, db))


def denormalize(
    name_or_value: str,
    scope: tuple,
    db: Optional[NormalizationDb] = None,
) -> str:
    """Inverse lookup.

    ``scope`` is ``(tech,)`` for a type name, ``(tech, canonical_type)`` for
    an attribute name and ``(tech, canonical_type, canonical_attr)`` for a
    value. Strings without an invertible rule are returned unchanged.
    """
    db = db or default_db()
    tech = Tech(scope[0]).value
    if len(scope) == 1:
        return db.type_inverse.get((tech, name_or_value), name_or_value)
    if len(scope) == 2 or scope[2] is None:
        return db.attr_inverse.get((tech, scope[1], name_or_value), name_or_value)
    return db.value_inverse.get((tech, scope[1], scope[2], name_or_value), name_or_value)
