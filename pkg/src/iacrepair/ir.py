"""Span-preserving intermediate representation shared by every frontend.

Nodes are frozen dataclasses. Anything that "changes" a script builds a new
tree with :func:`dataclasses.replace`; the original source text travels with
the :class:`IRScript` so spans can always be resolved back to bytes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple, Union


class Tech(str, enum.Enum):
    ANSIBLE = "ansible"
    PUPPET = "puppet"


UNKNOWN = "⟂unknown⟂"


@dataclass(frozen=True, order=True)
class Span:
    start_line: int
    start_col: int
    end_line: int
    end_col: int
    byte_start: int
    byte_end: int

    @property
    def synthetic(self) -> bool:
        return self.byte_start < 0

    def contains(self, other: "Span") -> bool:
        return self.byte_start <= other.byte_start and other.byte_end <= self.byte_end


# Attached to nodes created by repair; never valid for splicing.
SYNTHETIC_SPAN = Span(0, 0, 0, 0, -1, -1)


class SpanError(IndexError):
    pass


@dataclass(frozen=True)
class StringLiteral:
    value: str
    span: Span = SYNTHETIC_SPAN
    # '"' or "'" for quoted tokens, "" for bare words / plain scalars.
    quote: str = ""
    # True for a text fragment inside an interpolated string.
    fragment: bool = False


@dataclass(frozen=True)
class IntLiteral:
    value: int
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class BoolLiteral:
    value: bool
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class Null:
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class VariableReference:
    name: str
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class Concat:
    left: "IRExpression"
    right: "IRExpression"
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class Sum:
    left: "IRExpression"
    right: "IRExpression"
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class Equals:
    left: "IRExpression"
    right: "IRExpression"
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class NotEquals:
    left: "IRExpression"
    right: "IRExpression"
    span: Span = SYNTHETIC_SPAN


Literal = Union[StringLiteral, IntLiteral, BoolLiteral, Null]
BinaryOp = Union[Concat, Sum, Equals, NotEquals]
IRExpression = Union[Literal, VariableReference, BinaryOp]

LITERAL_TYPES = (StringLiteral, IntLiteral, BoolLiteral, Null)
BINARY_TYPES = (Concat, Sum, Equals, NotEquals)


@dataclass(frozen=True)
class ValueMap:
    """Raw <-> canonical value rules attached to one normalized attribute."""

    forward: Tuple[Tuple[str, str], ...] = ()
    backward: Tuple[Tuple[str, str], ...] = ()

    def to_canonical(self, raw: str) -> str:
        for r, c in self.forward:
            if r == raw:
                return c
        return raw

    def to_raw(self, canonical: str) -> str:
        for c, r in self.backward:
            if c == canonical:
                return r
        return canonical


@dataclass(frozen=True)
class IRAttribute:
    name: str
    value: IRExpression
    name_span: Span = SYNTHETIC_SPAN
    synthetic: bool = False
    value_map: Optional[ValueMap] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("attribute name must be non-empty")


@dataclass(frozen=True)
class IRResource:
    type_name: str
    title: Optional[IRExpression]
    attributes: Tuple[IRAttribute, ...]
    span: Span = SYNTHETIC_SPAN
    # Pre-order ordinal among the script's resources, fixed at parse time.
    index: int = -1
    # Body layout used when inserting attributes.
    flow: bool = False

    def attribute(self, name: str) -> Optional[IRAttribute]:
        for attr in reversed(self.attributes):
            if attr.name == name:
                return attr
        return None


@dataclass(frozen=True)
class VariableAssignment:
    name: str
    value: IRExpression
    span: Span = SYNTHETIC_SPAN
    index: int = -1


@dataclass(frozen=True)
class Conditional:
    condition: IRExpression
    then_branch: Tuple["IRStatement", ...]
    else_branch: Tuple["IRStatement", ...] = ()
    span: Span = SYNTHETIC_SPAN
    cid: int = -1


IRStatement = Union[IRResource, VariableAssignment, Conditional]


@dataclass(frozen=True)
class InsertionPoint:
    """Where a new top-level resource is appended, and how it is indented."""

    byte_offset: int
    indent: str = ""
    # Column of keys inside an existing task / resource body (Ansible).
    attr_indent: str = "  "


@dataclass(frozen=True)
class IRScript:
    tech: Tech
    statements: Tuple[IRStatement, ...]
    source: str
    insertion: Optional[InsertionPoint] = None
    _bytes: bytes = field(default=b"", repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._bytes:
            object.__setattr__(self, "_bytes", self.source.encode("utf-8"))

    @property
    def source_bytes(self) -> bytes:
        return self._bytes


BranchPath = Tuple[Tuple[int, str], ...]


def span_text(script: IRScript, span: Span) -> str:
    data = script.source_bytes
    if span.byte_start < 0 or span.byte_end > len(data) or span.byte_start > span.byte_end:
        raise SpanError(
            f"span [{span.byte_start}, {span.byte_end}) outside source of {len(data)} bytes"
        )
    return data[span.byte_start:span.byte_end].decode("utf-8")


def iter_resources(script: IRScript) -> list[tuple[IRResource, BranchPath]]:
    out: list[tuple[IRResource, BranchPath]] = []

    def walk(stmts: Tuple[IRStatement, ...], path: BranchPath) -> None:
        for stmt in stmts:
            if isinstance(stmt, IRResource):
                out.append((stmt, path))
            elif isinstance(stmt, Conditional):
                walk(stmt.then_branch, path + ((stmt.cid, "then"),))
                walk(stmt.else_branch, path + ((stmt.cid, "else"),))

    walk(script.statements, ())
    return out


def iter_statements(stmts: Tuple[IRStatement, ...]) -> Iterator[IRStatement]:
    """Pre-order walk over statements, descending into both branches."""
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, Conditional):
            yield from iter_statements(stmt.then_branch)
            yield from iter_statements(stmt.else_branch)


def iter_expression(expr: IRExpression) -> Iterator[IRExpression]:
    yield expr
    if isinstance(expr, BINARY_TYPES):
        yield from iter_expression(expr.left)
        yield from iter_expression(expr.right)


def literal_leaves(expr: IRExpression) -> list[Literal]:
    return [e for e in iter_expression(expr) if isinstance(e, LITERAL_TYPES)]


def variables_of(expr: IRExpression) -> list[str]:
    return [e.name for e in iter_expression(expr) if isinstance(e, VariableReference)]


def render_literal(expr: Literal) -> str:
    """Canonical string rendering used for cross-technology comparison."""
    if isinstance(expr, StringLiteral):
        return expr.value
    if isinstance(expr, BoolLiteral):
        return "true" if expr.value else "false"
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    return UNKNOWN


def iter_spanned_nodes(script: IRScript) -> Iterator[tuple[object, Span]]:
    """Every node with a real span, including attribute names."""
    for stmt in iter_statements(script.statements):
        if isinstance(stmt, IRResource):
            yield stmt, stmt.span
            if stmt.title is not None:
                for e in iter_expression(stmt.title):
                    yield e, e.span
            for attr in stmt.attributes:
                if not attr.synthetic:
                    yield attr, attr.name_span
                for e in iter_expression(attr.value):
                    yield e, e.span
        elif isinstance(stmt, VariableAssignment):
            yield stmt, stmt.span
            for e in iter_expression(stmt.value):
                yield e, e.span
        else:
            yield stmt, stmt.span
            for e in iter_expression(stmt.condition):
                yield e, e.span
