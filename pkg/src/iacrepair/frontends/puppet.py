"""Parser for the supported Puppet manifest subset.

Supported: resource declarations (one or more bodies), ``$x = value``
assignments, ``if``/``elsif``/``else`` over ``==``/``!=`` comparisons,
double-quoted interpolation and integer ``+``. Anything else raises
:class:`ParseError` with kind ``unsupported``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..ir import (
    BoolLiteral,
    Concat,
    Conditional,
    Equals,
    InsertionPoint,
    IntLiteral,
    IRAttribute,
    IRExpression,
    IRResource,
    IRScript,
    IRStatement,
    NotEquals,
    Null,
    StringLiteral,
    Sum,
    Tech,
    VariableAssignment,
    VariableReference,
)
from ._source import ParseError, SourceIndex

_VAR_NAME = r"(?:::)?[a-z_][A-Za-z0-9_]*(?:::[a-z_][A-Za-z0-9_]*)*"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*|/\*.*?\*/)
  | (?P<regex>/(?:[^/\\\n]|\\.)+/)
  | (?P<sq>'(?:[^'\\]|\\.)*')
  | (?P<dq>"(?:[^"\\]|\\.)*")
  | (?P<var>\$""" + _VAR_NAME + r""")
  | (?P<num>-?\d+(?:\.\d+)?)
  | (?P<bare>[A-Za-z_][A-Za-z0-9_\-]*(?:::[A-Za-z0-9_\-]+)*)
  | (?P<op>=>|==|!=|->|~>|=~|<<\||\|>>|[=+{}\[\]():,;])
    """,
    re.VERBOSE | re.DOTALL,
)

_UNSUPPORTED_KEYWORDS = {
    "class", "define", "node", "include", "require", "contain", "case",
    "unless", "function", "type", "import", "inherits", "each", "create_resources",
}


@dataclass
class _Tok:
    kind: str
    text: str
    start: int
    end: int


def _tokenize(src: str, index: SourceIndex) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            if src.startswith(("'", '"'), pos):
                raise index.error("unterminated string", pos)
            if src.startswith("/*", pos):
                raise index.error("unterminated comment", pos)
            raise index.error(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        assert kind is not None
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    toks.append(_Tok("eof", "", len(src), len(src)))
    return toks


_SQ_ESCAPE = re.compile(r"\\([\\'])")
_DQ_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "s": " ", '"': '"', "\\": "\\", "$": "$", "'": "'"}
_INTERP_RE = re.compile(r"\$\{(" + _VAR_NAME + r")\}|\$(" + _VAR_NAME + r")|\$\{")


def _unescape_dq(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw) and raw[i + 1] in _DQ_ESCAPES:
            out.append(_DQ_ESCAPES[raw[i + 1]])
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.index = SourceIndex(source)
        self.toks = _tokenize(source, self.index)
        self.pos = 0
        self.n_resources = 0
        self.n_assignments = 0
        self.n_conditionals = 0

    # token helpers
    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text or tok.kind not in ("op", "bare"):
            raise self.index.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.start)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "bare") and tok.text == text

    def span(self, start: int, end: int):
        return self.index.span(start, end)

    # grammar
    def parse(self) -> IRScript:
        stmts = self.statements(top=True)
        unit = _dominant_indent(self.src)
        insertion = InsertionPoint(len(self.src.encode("utf-8")), "", unit)
        return IRScript(Tech.PUPPET, tuple(stmts), self.src, insertion)

    def statements(self, top: bool = False) -> list[IRStatement]:
        out: list[IRStatement] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                if not top:
                    raise self.index.error("unexpected end of input, expected '}'", tok.start)
                return out
            if tok.kind == "op" and tok.text == "}":
                if top:
                    raise self.index.error("unbalanced '}'", tok.start)
                return out
            out.extend(self.statement())

    def statement(self) -> list[IRStatement]:
        tok = self.peek()
        if tok.kind == "var":
            return [self.assignment()]
        if tok.kind == "bare":
            if tok.text == "if":
                return [self.conditional()]
            if tok.text in _UNSUPPORTED_KEYWORDS:
                raise self.index.error(f"unsupported construct {tok.text!r}", tok.start, "unsupported")
            if tok.text[0].isupper():
                raise self.index.error("resource defaults and references are not supported", tok.start, "unsupported")
            if self.peek(1).text == "{":
                return self.resource()
            if self.peek(1).text == "(":
                raise self.index.error(f"function call {tok.text!r} is not supported", tok.start, "unsupported")
        if tok.kind == "op" and tok.text in ("->", "~>"):
            raise self.index.error("resource chaining is not supported", tok.start, "unsupported")
        raise self.index.error(f"unexpected token {tok.text!r}", tok.start)

    def assignment(self) -> VariableAssignment:
        var = self.next()
        self.expect("=")
        value = self.expression()
        if self.at("[") or self.peek().kind == "op" and self.peek().text in ("->", "~>"):
            raise self.index.error("unsupported expression", self.peek().start, "unsupported")
        idx = self.n_assignments
        self.n_assignments += 1
        return VariableAssignment(
            var.text[1:].lstrip(":"), value, self.span(var.start, self._end_of(value, var)), idx
        )

    def conditional(self) -> Conditional:
        start = self.next()  # 'if' or 'elsif'
        cid = self.n_conditionals
        self.n_conditionals += 1
        cond_start = self.peek().start
        cond = self.expression()
        if not isinstance(cond, (Equals, NotEquals)):
            raise self.index.error("conditions must be '==' or '!=' comparisons", cond_start, "unsupported")
        self.expect("{")
        then_branch = self.statements()
        end = self.expect("}").end
        else_branch: list[IRStatement] = []
        if self.at("elsif"):
            nested = self.conditional()
            else_branch = [nested]
            end = self.index.char_offset(nested.span.byte_end)
        elif self.at("else"):
            self.next()
            self.expect("{")
            else_branch = self.statements()
            end = self.expect("}").end
        return Conditional(cond, tuple(then_branch), tuple(else_branch), self.span(start.start, end), cid)

    def resource(self) -> list[IRResource]:
        type_tok = self.next()
        self.expect("{")
        bodies: list[tuple[Optional[IRExpression], list[IRAttribute], int, int]] = []
        while True:
            if self.at("["):
                raise self.index.error(
                    "array titles declare several resources in one construct",
                    self.peek().start,
                    "unsupported-array-title",
                )
            body_start = self.peek().start
            title = self.primary()
            self.expect(":")
            attrs, body_end = self.attributes()
            bodies.append((title, attrs, body_start, body_end))
            if self.at(";"):
                self.next()
                if self.at("}"):
                    break
                continue
            break
        close = self.expect("}")
        out = []
        for title, attrs, body_start, body_end in bodies:
            if len(bodies) == 1:
                span = self.span(type_tok.start, close.end)
            else:
                span = self.span(body_start, body_end)
            out.append(
                IRResource(type_tok.text.lower(), title, tuple(attrs), span, self.n_resources)
            )
            self.n_resources += 1
        return out

    def attributes(self) -> tuple[list[IRAttribute], int]:
        attrs: list[IRAttribute] = []
        end = self.toks[self.pos - 1].end
        while self.peek().kind == "bare" and self.peek(1).text == "=>":
            name = self.next()
            self.next()
            if self.at("["):
                raise self.index.error("array values are not supported", self.peek().start, "unsupported")
            value = self.expression()
            attrs.append(IRAttribute(name.text, value, self.span(name.start, name.end)))
            end = self.toks[self.pos - 1].end
            if self.at(","):
                self.next()
                continue
            break
        if not (self.at("}") or self.at(";")):
            tok = self.peek()
            raise self.index.error(f"unexpected token {tok.text!r} in resource body", tok.start)
        return attrs, end

    def expression(self) -> IRExpression:
        left = self.additive()
        if self.peek().kind == "op" and self.peek().text in ("==", "!="):
            op = self.next().text
            right = self.additive()
            span = self.span(self._start_of(left), self._end_of(right))
            return Equals(left, right, span) if op == "==" else NotEquals(left, right, span)
        if self.peek().kind == "op" and self.peek().text == "=~":
            raise self.index.error("regex matching is not supported", self.peek().start, "unsupported")
        return left

    def additive(self) -> IRExpression:
        left = self.primary()
        while self.at("+"):
            self.next()
            right = self.primary()
            left = Sum(left, right, self.span(self._start_of(left), self._end_of(right)))
        return left

    def primary(self) -> IRExpression:
        tok = self.next()
        span = self.span(tok.start, tok.end)
        if tok.kind == "sq":
            return StringLiteral(_SQ_ESCAPE.sub(r"\1", tok.text[1:-1]), span, "'")
        if tok.kind == "dq":
            return self.interpolated(tok)
        if tok.kind == "var":
            return VariableReference(tok.text[1:].lstrip(":"), span)
        if tok.kind == "num":
            if (tok.text.startswith("0") and len(tok.text) > 1) or "." in tok.text:
                return StringLiteral(tok.text, span, "")
            return IntLiteral(int(tok.text), span)
        if tok.kind == "bare":
            if tok.text == "true":
                return BoolLiteral(True, span)
            if tok.text == "false":
                return BoolLiteral(False, span)
            if tok.text == "undef":
                return Null(span)
            if tok.text[0].isupper() and self.at("["):
                # Resource reference, kept opaque.
                self.next()
                self.primary()
                close = self.expect("]")
                return StringLiteral(self.src[tok.start:close.end], self.span(tok.start, close.end), "")
            return StringLiteral(tok.text, span, "")
        if tok.kind == "op" and tok.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.kind == "op" and tok.text == "[":
            raise self.index.error("array values are not supported", tok.start, "unsupported")
        if tok.kind == "regex":
            raise self.index.error("regular expressions are not supported", tok.start, "unsupported")
        raise self.index.error(f"unexpected token {tok.text or 'end of input'!r}", tok.start)

    def interpolated(self, tok: _Tok) -> IRExpression:
        raw = tok.text[1:-1]
        base = tok.start + 1
        parts: list[IRExpression] = []
        pos = 0
        for m in _INTERP_RE.finditer(raw):
            # Skip escaped dollars.
            backslashes = len(raw[:m.start()]) - len(raw[:m.start()].rstrip("\\"))
            if backslashes % 2 == 1:
                continue
            if m.group(1) is None and m.group(2) is None:
                raise self.index.error("only ${variable} interpolation is supported", base + m.start(), "unsupported")
            if m.start() > pos:
                parts.append(self._fragment(raw, base, pos, m.start()))
            name = (m.group(1) or m.group(2)).lstrip(":")
            parts.append(VariableReference(name, self.span(base + m.start(), base + m.end())))
            pos = m.end()
        whole = self.span(tok.start, tok.end)
        if not parts:
            return StringLiteral(_unescape_dq(raw), whole, '"')
        if pos < len(raw):
            parts.append(self._fragment(raw, base, pos, len(raw)))
        if len(parts) == 1:
            return VariableReference(parts[0].name, whole)  # type: ignore[union-attr]
        expr = parts[-1]
        for i in range(len(parts) - 2, -1, -1):
            if i == 0:
                span = whole
            else:
                span = self.span(self._start_of(parts[i]), self._end_of(parts[-1]))
            expr = Concat(parts[i], expr, span)
        return expr

    def _fragment(self, raw: str, base: int, a: int, b: int) -> StringLiteral:
        return StringLiteral(_unescape_dq(raw[a:b]), self.span(base + a, base + b), '"', fragment=True)

    def _start_of(self, expr: IRExpression) -> int:
        return self.index.char_offset(expr.span.byte_start)

    def _end_of(self, expr: IRExpression, fallback: Optional[_Tok] = None) -> int:
        return self.index.char_offset(expr.span.byte_end)


def _dominant_indent(text: str) -> str:
    counts: dict[int, int] = {}
    for line in text.splitlines():
        stripped = line.lstrip(" ")
        n = len(line) - len(stripped)
        if n and stripped and not stripped.startswith("#"):
            counts[n] = counts.get(n, 0) + 1
    if not counts:
        return "  "
    best = min(counts, key=lambda n: (-counts[n], n))
    return " " * best


def parse_puppet(source: str) -> IRScript:
    """Parse a Puppet manifest into raw (un-normalized) IR."""
    try:
        return _Parser(source).parse()
    except RecursionError:
        raise ParseError("nesting too deep", 0, 0, "unsupported") from None
