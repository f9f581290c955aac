"""Turn repair edits back into minimal byte-level source patches."""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import yaml

from .infer import identifying_attribute
from .ir import (
    BoolLiteral,
    IntLiteral,
    IRAttribute,
    IRExpression,
    IRResource,
    IRScript,
    StringLiteral,
    Tech,
    Span,
    iter_spanned_nodes,
    iter_statements,
)
from .normalize import NormalizationDb, default_db, denormalize, normalize_script
from .repair import (
    AttributeValue,
    ConditionLiteral,
    Edit,
    MissingAttribute,
    MissingResource,
    RepairSolution,
    VariableLiteral,
)


class PatchError(ValueError):
    pass


class PatchConflict(PatchError):
    pass


@dataclass(frozen=True, order=True)
class TextPatch:
    byte_start: int
    byte_end: int
    replacement: str


_PUPPET_BARE = re.compile(r"[a-z][a-z0-9_]*\Z")
_PUPPET_RESERVED = {"undef", "if", "else", "elsif", "unless", "case", "default", "and", "or", "in", "node", "class"}
_YAML_PLAIN = re.compile(r"[A-Za-z0-9_/.@+~-][A-Za-z0-9_/.@+~ =-]*\Z")
_INT = re.compile(r"(0|[1-9][0-9]*)\Z")


def _single_quoted(value: str) -> str:
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _double_quoted(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + escaped.replace("\n", "\\n").replace("\t", "\\t") + '"'


def _yaml_single(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def _yaml_plain_ok(value: str) -> bool:
    if not value or not _YAML_PLAIN.match(value) or value.endswith(" ") or "{{" in value:
        return False
    try:
        loaded = yaml.safe_load(value)
    except yaml.YAMLError:
        return False
    if isinstance(loaded, str):
        return loaded == value
    if isinstance(loaded, bool):
        return value in ("true", "false")
    if isinstance(loaded, int) and not isinstance(loaded, bool):
        return str(loaded) == value
    return False


def render_value(value: str, tech: Tech, quote: Optional[str] = None, jinja: bool = False) -> str:
    """Source text for a literal ``value``.

    ``quote`` is the style of the literal being replaced; ``None`` means a
    fresh insertion. ``jinja`` selects expression syntax inside an Ansible
    condition.
    """
    if jinja:
        if _INT.match(value) and quote == "":
            return value
        return '"' + value.replace('"', '\\"') + '"' if quote == '"' else _yaml_single(value).replace("''", "\\'")
    if tech == Tech.PUPPET:
        if quote == '"':
            return _double_quoted(value).replace("$", "\\$")
        if quote == "'":
            return _single_quoted(value)
        if _PUPPET_BARE.match(value) and value not in _PUPPET_RESERVED:
            return value
        return _single_quoted(value)
    if quote == "'":
        return _yaml_single(value)
    if quote == '"':
        return _double_quoted(value)
    return value if _yaml_plain_ok(value) else _double_quoted(value)


def _quote_of(expr: IRExpression) -> str:
    return expr.quote if isinstance(expr, StringLiteral) else ""


def _line_start(data: bytes, offset: int) -> int:
    return data.rfind(b"\n", 0, offset) + 1


def _line_end(data: bytes, offset: int) -> int:
    end = data.find(b"\n", offset)
    return len(data) if end < 0 else end


def _indent_at(data: bytes, offset: int) -> str:
    start = _line_start(data, offset)
    line = data[start:_line_end(data, start)].decode("utf-8")
    return line[: len(line) - len(line.lstrip(" \t"))]


class _Renderer:
    def __init__(self, script: IRScript, db: NormalizationDb):
        self.script = script
        self.db = db
        self.tech = script.tech
        self.data = script.source_bytes
        self.resources = {s.index: s for s in iter_statements(script.statements) if isinstance(s, IRResource)}

    def raw_attr(self, ctype: str, name: str) -> str:
        return denormalize(name, (self.tech, ctype), self.db)

    def raw_value(self, ctype: str, attr: str, value: str) -> str:
        return denormalize(value, (self.tech, ctype, attr), self.db)

    def find_literal(self, span: Span) -> Optional[IRExpression]:
        for node, sp in iter_spanned_nodes(self.script):
            if sp == span and not isinstance(node, (IRAttribute, IRResource)):
                return node
        return None

    def replacement(self, edit: Edit) -> TextPatch:
        site = edit.site
        span = site.span
        if span.synthetic:
            raise PatchError(f"edit site {site!r} has no source position")
        if isinstance(site, AttributeValue):
            res = self.resources[site.resource]
            attr = res.attribute(site.attribute)
            if attr is None:
                raise PatchError(f"{site.resource_id} has no attribute {site.attribute!r}")
            raw = attr.value_map.to_raw(edit.new_value) if attr.value_map else edit.new_value
            text = render_value(raw, self.tech, _quote_of(attr.value))
        elif isinstance(site, VariableLiteral):
            node = self.find_literal(span)
            text = render_value(edit.new_value, self.tech, _quote_of(node) if node is not None else "")
        else:
            node = self.find_literal(span)
            quote = _quote_of(node) if node is not None else ""
            if isinstance(node, (IntLiteral, BoolLiteral)) and not _INT.match(edit.new_value):
                quote = "'"
            text = render_value(edit.new_value, self.tech, quote, jinja=self.tech == Tech.ANSIBLE)
        return TextPatch(span.byte_start, span.byte_end, text)

    # attribute insertion into an existing declaration
    def add_attributes(self, res: IRResource, pairs: list[tuple[str, str]]) -> TextPatch:
        raw_pairs = [(self.raw_attr(res.type_name, k), self.raw_value(res.type_name, k, v)) for k, v in pairs]
        placed = [a for a in res.attributes if not a.synthetic and not a.value.span.synthetic]
        last = max(placed, key=lambda a: a.value.span.byte_end, default=None)
        if self.tech == Tech.PUPPET:
            return self._puppet_attrs(res, last, raw_pairs)
        return self._yaml_attrs(res, last, raw_pairs)

    def _puppet_attrs(self, res: IRResource, last: Optional[IRAttribute], pairs: list[tuple[str, str]]) -> TextPatch:
        data = self.data
        body = [f"{k} => {render_value(v, Tech.PUPPET)}" for k, v in pairs]
        if last is None:
            if res.title is None or res.title.span.synthetic:
                raise PatchError("cannot locate the resource body")
            colon = data.find(b":", res.title.span.byte_end)
            if colon < 0:
                raise PatchError("cannot locate the resource title colon")
            return TextPatch(colon + 1, colon + 1, " " + ", ".join(body) + ",")
        end = last.value.span.byte_end
        rest = data[end:]
        m = re.match(rb"[ \t]*,", rest)
        comma_end = end + m.end() if m else end
        multiline = _line_start(data, last.name_span.byte_start) > res.span.byte_start
        if multiline:
            indent = _indent_at(data, last.name_span.byte_start)
            text = ("" if m else ",") + "".join(f"\n{indent}{line}," for line in body)
            return TextPatch(comma_end, comma_end, text)
        if m:
            return TextPatch(comma_end, comma_end, "".join(f" {line}," for line in body))
        return TextPatch(end, end, "".join(f", {line}" for line in body))

    def _yaml_attrs(self, res: IRResource, last: Optional[IRAttribute], pairs: list[tuple[str, str]]) -> TextPatch:
        if last is None:
            raise PatchError("cannot add attributes to a module without arguments")
        end = last.value.span.byte_end
        if res.flow:
            return TextPatch(end, end, "".join(f", {k}: {render_value(v, Tech.ANSIBLE)}" for k, v in pairs))
        indent = _indent_at(self.data, last.name_span.byte_start)
        line_end = _line_end(self.data, end)
        return TextPatch(line_end, line_end,
                         "".join(f"\n{indent}{k}: {render_value(v, Tech.ANSIBLE)}" for k, v in pairs))

    # new declarations
    def new_resources(self, resources: dict[str, list[tuple[str, str]]]) -> TextPatch:
        point = self.script.insertion
        data = self.data
        offset = point.byte_offset if point is not None else len(data)
        chunks: list[str] = []
        for rid in sorted(resources):
            ctype, _, ident = rid.partition(":")
            raw_type = denormalize(ctype, (self.tech,), self.db)
            pairs = [(self.raw_attr(ctype, k), self.raw_value(ctype, k, v)) for k, v in sorted(resources[rid])]
            if self.tech == Tech.PUPPET:
                unit = point.attr_indent if point is not None else "  "
                lines = [f"{raw_type} {{ {_single_quoted(ident)}:"]
                lines += [f"{unit}{k} => {render_value(v, Tech.PUPPET)}," for k, v in pairs]
                lines.append("}")
                chunks.append("\n".join(lines) + "\n")
            else:
                indent = point.indent if point is not None else ""
                unit = point.attr_indent if point is not None else "  "
                inner = indent + "  " + unit
                id_attr = self.raw_attr(ctype, identifying_attribute(ctype) or "name")
                lines = [f"{indent}- {raw_type}:", f"{inner}{id_attr}: {render_value(ident, Tech.ANSIBLE)}"]
                lines += [f"{inner}{k}: {render_value(v, Tech.ANSIBLE)}" for k, v in pairs]
                chunks.append("\n".join(lines) + "\n")
        before = data[:offset]
        lead = ""
        if before and not before.endswith(b"\n"):
            lead = "\n"
        if self.tech == Tech.PUPPET and before.strip():
            lead += "\n"
        sep = "\n" if self.tech == Tech.PUPPET else ""
        return TextPatch(offset, offset, lead + sep.join(chunks))


def render_patches(script: IRScript, edits: Union[RepairSolution, Iterable[Edit]],
                   db: Optional[NormalizationDb] = None) -> list[TextPatch]:
    """Text patches for ``edits`` against the normalized ``script``."""
    edits = edits.edits if isinstance(edits, RepairSolution) else tuple(edits)
    r = _Renderer(script, db or default_db())
    patches: list[TextPatch] = []
    added: dict[int, list[tuple[str, str]]] = {}
    inserted: dict[str, list[tuple[str, str]]] = {}
    for e in edits:
        s = e.site
        if isinstance(s, (AttributeValue, VariableLiteral, ConditionLiteral)):
            patches.append(r.replacement(e))
        elif isinstance(s, MissingResource):
            inserted.setdefault(s.resource_id, [])
    for e in edits:
        s = e.site
        if isinstance(s, MissingAttribute):
            if s.resource >= 0:
                added.setdefault(s.resource, []).append((s.attribute, e.new_value))
            elif s.resource_id in inserted:
                inserted[s.resource_id].append((s.attribute, e.new_value))
            else:
                raise PatchError(f"attribute for {s.resource_id!r} without a resource insertion")
    for index in sorted(added):
        patches.append(r.add_attributes(r.resources[index], sorted(added[index])))
    if inserted:
        patches.append(r.new_resources(inserted))
    return patches


def render_edits(solution: Union[RepairSolution, Iterable[Edit]], script: IRScript,
                 db: Optional[NormalizationDb] = None) -> list[TextPatch]:
    """Sorted, non-overlapping patches for a solution found on ``script``.

    ``script`` may be raw or already normalized; spans are identical.
    """
    db = db or default_db()
    patches = sorted(render_patches(normalize_script(script, db), solution, db),
                     key=lambda p: (p.byte_start, p.byte_end))
    for a, b in zip(patches, patches[1:]):
        if b.byte_start < a.byte_end:
            raise PatchConflict(f"patches [{a.byte_start}, {a.byte_end}) and [{b.byte_start}, {b.byte_end}) overlap")
    return patches


def apply_patches(source: Union[str, bytes], patches: Iterable[TextPatch]) -> str:
    """Splice ``patches`` into ``source``; same-offset insertions are kept in order."""
    data = source.encode("utf-8") if isinstance(source, str) else source
    ordered = sorted(enumerate(patches), key=lambda p: (p[1].byte_start, p[1].byte_end, p[0]))
    out: list[bytes] = []
    pos = 0
    for _, p in ordered:
        if p.byte_start < pos or p.byte_end < p.byte_start or p.byte_end > len(data):
            raise PatchConflict(f"patch [{p.byte_start}, {p.byte_end}) overlaps another or lies outside the source")
        out.append(data[pos:p.byte_start])
        out.append(p.replacement.encode("utf-8"))
        pos = p.byte_end
    out.append(data[pos:])
    return b"".join(out).decode("utf-8")


def patch_source(script: IRScript, edits: Union[RepairSolution, Iterable[Edit]],
                 db: Optional[NormalizationDb] = None) -> str:
    return apply_patches(script.source_bytes, render_edits(edits, script, db))


def unified_diff(old: str, new: str, path: str = "script") -> str:
    return "".join(difflib.unified_diff(
        old.splitlines(keepends=True), new.splitlines(keepends=True),
        fromfile=f"a/{path}", tofile=f"b/{path}",
    ))
