"""Parser for the supported Ansible playbook / task-file subset.

PyYAML composes the node graph (which carries marks for every scalar);
scalar typing is done here so that ``0644`` stays a string and every
literal keeps the exact span of its written form.
"""

from __future__ import annotations

import re
from typing import Optional

import yaml
from yaml.nodes import MappingNode, Node, ScalarNode, SequenceNode

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
    Tech,
    VariableAssignment,
    VariableReference,
)
from ._source import ParseError, SourceIndex

_PLAY_KEYS = {"hosts", "tasks", "roles", "pre_tasks", "post_tasks", "handlers", "import_playbook"}
_IGNORED_PLAY_KEYS = {
    "name", "hosts", "become", "become_user", "become_method", "gather_facts",
    "remote_user", "connection", "serial", "tags", "environment", "any_errors_fatal",
}
_IGNORED_TASK_KEYS = {
    "name", "become", "become_user", "become_method", "tags", "notify", "register",
    "ignore_errors", "changed_when", "failed_when", "check_mode", "delegate_to",
    "environment", "no_log", "run_once", "diff", "throttle", "timeout",
}
_UNSUPPORTED_TASK_KEYS = {
    "loop", "with_items", "with_dict", "with_list", "with_fileglob", "loop_control",
    "block", "rescue", "always", "include", "include_tasks", "import_tasks",
    "include_role", "import_role", "vars", "args", "action", "local_action",
    "until", "retries", "delay", "async", "poll",
}

_INT_RE = re.compile(r"[-+]?(?:0|[1-9][0-9]*)\Z")
_BOOLS = {
    "true": True, "True": True, "TRUE": True, "yes": True, "Yes": True, "YES": True,
    "on": True, "On": True, "ON": True,
    "false": False, "False": False, "FALSE": False, "no": False, "No": False, "NO": False,
    "off": False, "Off": False, "OFF": False,
}
_NULLS = {"", "~", "null", "Null", "NULL"}
_JINJA_VAR = re.compile(r"\{\{\s*([A-Za-z_][A-Za-z0-9_]*)\s*\}\}")
_WHEN_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(==|!=)\s*(.*?)\s*\Z", re.DOTALL)


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.index = SourceIndex(source)
        self.n_resources = 0
        self.n_assignments = 0
        self.n_conditionals = 0
        self.seen: set[int] = set()
        self.last_task_seq: Optional[SequenceNode] = None
        self.resources_by_seq: list[tuple[MappingNode, ScalarNode]] = []

    def error(self, message: str, node: Node, kind: str = "syntax") -> ParseError:
        return self.index.error(message, node.start_mark.index, kind)

    def span_of(self, node: Node):
        return self.index.span(node.start_mark.index, self.end_of(node))

    def end_of(self, node: Node) -> int:
        # Block collections end at the next token; clamp to the last child.
        if isinstance(node, ScalarNode) or getattr(node, "flow_style", False):
            return node.end_mark.index
        if isinstance(node, MappingNode):
            if not node.value:
                return node.end_mark.index
            return self.end_of(node.value[-1][1])
        if isinstance(node, SequenceNode):
            if not node.value:
                return node.end_mark.index
            return self.end_of(node.value[-1])
        return node.end_mark.index

    def check_unique(self, node: Node) -> None:
        if id(node) in self.seen:
            raise self.error("YAML aliases are not supported", node, "unsupported")
        self.seen.add(id(node))

    def parse(self) -> IRScript:
        try:
            docs = list(yaml.compose_all(self.src, Loader=yaml.SafeLoader))
        except yaml.MarkedYAMLError as exc:
            mark = exc.problem_mark or exc.context_mark
            line = mark.line + 1 if mark else 0
            col = mark.column + 1 if mark else 0
            raise ParseError(str(exc.problem or exc), line, col, "syntax") from None
        except yaml.YAMLError as exc:
            raise ParseError(str(exc), 0, 0, "syntax") from None
        docs = [d for d in docs if d is not None]
        if len(docs) > 1:
            raise self.error("multiple YAML documents are not supported", docs[1], "unsupported")
        if not docs:
            return IRScript(Tech.ANSIBLE, (), self.src, self._insertion(None))
        root = docs[0]
        if isinstance(root, ScalarNode) and root.value == "":
            return IRScript(Tech.ANSIBLE, (), self.src, self._insertion(None))
        if not isinstance(root, SequenceNode):
            raise self.error("expected a list of plays or tasks", root)
        stmts: list[IRStatement] = []
        is_playbook = any(
            isinstance(item, MappingNode) and any(self.key(k) in _PLAY_KEYS for k, _ in item.value)
            for item in root.value
        )
        if is_playbook:
            for item in root.value:
                stmts.extend(self.play(item))
        else:
            stmts.extend(self.task_list(root))
        return IRScript(Tech.ANSIBLE, tuple(stmts), self.src, self._insertion(root))

    def key(self, node: Node) -> str:
        if not isinstance(node, ScalarNode):
            raise self.error("mapping keys must be scalars", node)
        return node.value

    def play(self, node: Node) -> list[IRStatement]:
        if not isinstance(node, MappingNode):
            raise self.error("a play must be a mapping", node)
        self.check_unique(node)
        out: list[IRStatement] = []
        tasks: Optional[Node] = None
        for k, v in node.value:
            key = self.key(k)
            if key == "vars":
                out.extend(self.assignments(v))
            elif key == "tasks":
                tasks = v
            elif key in ("roles", "pre_tasks", "post_tasks", "handlers", "import_playbook", "vars_files"):
                if not (isinstance(v, SequenceNode) and not v.value):
                    raise self.error(f"play key {key!r} is not supported", k, "unsupported")
            elif key == "<<":
                raise self.error("merge keys are not supported", k, "unsupported")
            elif key not in _IGNORED_PLAY_KEYS:
                raise self.error(f"unsupported play key {key!r}", k, "unsupported")
        if tasks is not None:
            if isinstance(tasks, ScalarNode) and tasks.value in _NULLS:
                return out
            out.extend(self.task_list(tasks))
        return out

    def task_list(self, node: Node) -> list[IRStatement]:
        if not isinstance(node, SequenceNode):
            raise self.error("tasks must be a list", node)
        self.check_unique(node)
        out: list[IRStatement] = []
        for item in node.value:
            out.extend(self.task(item))
        self.last_task_seq = node
        return out

    def task(self, node: Node) -> list[IRStatement]:
        if not isinstance(node, MappingNode):
            raise self.error("a task must be a mapping", node)
        self.check_unique(node)
        when: Optional[tuple[ScalarNode, Node]] = None
        module: Optional[tuple[ScalarNode, Node]] = None
        facts: Optional[Node] = None
        for k, v in node.value:
            key = self.key(k)
            if key == "when":
                when = (k, v)
            elif key in ("set_fact", "ansible.builtin.set_fact"):
                facts = v
            elif key in _IGNORED_TASK_KEYS:
                continue
            elif key in _UNSUPPORTED_TASK_KEYS or key.startswith("with_"):
                raise self.error(f"task keyword {key!r} is not supported", k, "unsupported")
            elif module is not None:
                raise self.error(f"task has more than one module ({module[0].value!r}, {key!r})", k)
            else:
                module = (k, v)  # type: ignore[assignment]
        if module is not None and facts is not None:
            raise self.error("task has more than one module", node)
        # Conditional ids are pre-order: allocate before the body.
        cid = None
        if when is not None:
            cid = self.n_conditionals
            self.n_conditionals += 1
        body: list[IRStatement]
        if facts is not None:
            body = self.assignments(facts)
        elif module is not None:
            body = [self.resource(*module)]
        else:
            raise self.error("task has no module", node)
        if when is None:
            return body
        cond = self.condition(when[1])
        return [Conditional(cond, tuple(body), (), self.span_of(node), cid)]  # type: ignore[arg-type]

    def resource(self, key: ScalarNode, value: Node) -> IRResource:
        if not isinstance(value, MappingNode):
            raise self.error(f"module {key.value!r} must take a mapping of arguments", value, "unsupported")
        self.check_unique(value)
        attrs = []
        for k, v in value.value:
            name = self.key(k)
            if name == "<<":
                raise self.error("merge keys are not supported", k, "unsupported")
            attrs.append(IRAttribute(name, self.scalar(v), self.span_of(k)))
        span = self.index.span(key.start_mark.index, self.end_of(value))
        res = IRResource(key.value, None, tuple(attrs), span, self.n_resources, bool(value.flow_style))
        self.n_resources += 1
        self.resources_by_seq.append((value, key))
        return res

    def assignments(self, node: Node) -> list[IRStatement]:
        if not isinstance(node, MappingNode):
            raise self.error("variables must be a mapping", node, "unsupported")
        self.check_unique(node)
        out: list[IRStatement] = []
        for k, v in node.value:
            name = self.key(k)
            span = self.index.span(k.start_mark.index, self.end_of(v))
            out.append(VariableAssignment(name, self.scalar(v), span, self.n_assignments))
            self.n_assignments += 1
        return out

    def _content(self, node: ScalarNode) -> Optional[int]:
        """Char offset where the scalar's value starts, if it maps 1:1 to source."""
        start, end = node.start_mark.index, node.end_mark.index
        if node.style in ("'", '"'):
            start, end = start + 1, end - 1
        elif node.style is not None:
            return None
        return start if self.src[start:end] == node.value else None

    def scalar(self, node: Node) -> IRExpression:
        if not isinstance(node, ScalarNode):
            raise self.error("only scalar values are supported", node, "unsupported")
        self.check_unique(node)
        span = self.span_of(node)
        value = node.value
        if "{{" in value or "{%" in value:
            return self.interpolated(node)
        if node.style is None:
            if _INT_RE.match(value):
                return IntLiteral(int(value), span)
            if value in _BOOLS:
                return BoolLiteral(_BOOLS[value], span)
            if value in _NULLS:
                return Null(span)
            return StringLiteral(value, span, "")
        quote = node.style if node.style in ("'", '"') else '"'
        return StringLiteral(value, span, quote)

    def interpolated(self, node: ScalarNode) -> IRExpression:
        base = self._content(node)
        if base is None:
            raise self.error("interpolation inside escaped or folded scalars is not supported", node, "unsupported")
        value = node.value
        quote = node.style if node.style in ("'", '"') else ""
        parts: list[IRExpression] = []
        pos = 0
        for m in _JINJA_VAR.finditer(value):
            if m.start() > pos:
                parts.append(self._fragment(value, base, pos, m.start(), quote, node))
            parts.append(VariableReference(m.group(1), self.index.span(base + m.start(), base + m.end())))
            pos = m.end()
        if pos < len(value):
            parts.append(self._fragment(value, base, pos, len(value), quote, node))
        whole = self.span_of(node)
        if len(parts) == 1:
            return VariableReference(parts[0].name, whole)  # type: ignore[union-attr]
        expr = parts[-1]
        for i in range(len(parts) - 2, -1, -1):
            if i == 0:
                span = whole
            else:
                span = self.index.span(
                    self.index.char_offset(parts[i].span.byte_start),
                    self.index.char_offset(parts[-1].span.byte_end),
                )
            expr = Concat(parts[i], expr, span)
        return expr

    def _fragment(self, value: str, base: int, a: int, b: int, quote: str, node: Node) -> StringLiteral:
        text = value[a:b]
        if "{{" in text or "{%" in text or "}}" in text:
            raise self.error("only {{ variable }} interpolation is supported", node, "unsupported")
        return StringLiteral(text, self.index.span(base + a, base + b), quote, fragment=True)

    def condition(self, node: Node) -> IRExpression:
        if not isinstance(node, ScalarNode) or node.style not in (None, "'", '"'):
            raise self.error("'when' must be a 'var == literal' comparison", node, "unsupported")
        self.check_unique(node)
        base = self._content(node)
        m = _WHEN_RE.match(node.value)
        if base is None or m is None:
            raise self.error("'when' must be a 'var == literal' comparison", node, "unsupported")
        var = VariableReference(m.group(1), self.index.span(base + m.start(1), base + m.end(1)))
        lit_text = m.group(3)
        a, b = base + m.start(3), base + m.end(3)
        lit_span = self.index.span(a, b)
        lit: IRExpression
        if len(lit_text) >= 2 and lit_text[0] == lit_text[-1] and lit_text[0] in "'\"":
            inner = lit_text[1:-1]
            if lit_text[0] in inner or "\\" in inner:
                raise self.error("escaped string in 'when' is not supported", node, "unsupported")
            lit = StringLiteral(inner, lit_span, lit_text[0])
        elif _INT_RE.match(lit_text):
            lit = IntLiteral(int(lit_text), lit_span)
        elif lit_text in ("true", "True", "false", "False"):
            lit = BoolLiteral(lit_text.lower() == "true", lit_span)
        else:
            raise self.error("'when' must compare a variable with a literal", node, "unsupported")
        span = self.index.span(base + m.start(1), b)
        return Equals(var, lit, span) if m.group(2) == "==" else NotEquals(var, lit, span)

    def _insertion(self, root: Optional[Node]) -> Optional[InsertionPoint]:
        unit = "  "
        if self.resources_by_seq:
            mapping, key = self.resources_by_seq[-1]
            if not mapping.flow_style and mapping.value:
                delta = mapping.value[0][0].start_mark.column - key.start_mark.column
                if delta > 0:
                    unit = " " * delta
        seq = self.last_task_seq
        if root is None:
            return InsertionPoint(len(self.src.encode("utf-8")), "", unit)
        if seq is None or getattr(seq, "flow_style", False):
            return None
        if not seq.value:
            return None
        end = self.end_of(seq.value[-1])
        nl = self.src.find("\n", end)
        offset = len(self.src) if nl < 0 else nl + 1
        first = seq.value[0]
        line_start = self.index.line_start(first.start_mark.index)
        dash = self.src.find("-", line_start, first.start_mark.index)
        if dash < 0:
            return None
        return InsertionPoint(self.index.byte(offset), " " * (dash - line_start), unit)


def parse_ansible(source: str) -> IRScript:
    """Parse an Ansible playbook or task list into raw (un-normalized) IR."""
    try:
        return _Parser(source).parse()
    except RecursionError:
        raise ParseError("nesting too deep", 0, 0, "unsupported") from None
