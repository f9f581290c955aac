"""State inference.

Two sources are supported: static evaluation of a normalized script over
its branch combinations, and a syscall trace plus filesystem probing.
"""

from __future__ import annotations

import grp
import hashlib
import logging
import os
import pwd
import re
import stat
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from .ir import (
    UNKNOWN,
    BoolLiteral,
    Concat,
    Conditional,
    Equals,
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
    VariableAssignment,
    VariableReference,
)
from .normalize import CANONICAL_MODEL
from .state import ResourceState, SystemState

log = logging.getLogger(__name__)

DEFAULT_BRANCH_CAP = 64
_FALLBACK_ID_ATTRS = ("name", "path", "dest")
_INT_RE = re.compile(r"-?\d+\Z")


class InferenceError(ValueError):
    pass


class CapacityError(InferenceError):
    pass


BranchDecisions = tuple[tuple[int, str], ...]


@dataclass
class EvalEnv:
    bindings: dict[str, str] = field(default_factory=dict)
    branch_decisions: list[tuple[int, str]] = field(default_factory=list)


def eval_expression(expr: IRExpression, env: Union[EvalEnv, Mapping[str, str]]) -> str:
    """Evaluate to a canonical string, or :data:`UNKNOWN`."""
    bindings = env.bindings if isinstance(env, EvalEnv) else env
    return _eval(expr, bindings)


def _eval(expr: IRExpression, b: Mapping[str, str]) -> str:
    if isinstance(expr, StringLiteral):
        return expr.value
    if isinstance(expr, VariableReference):
        return b.get(expr.name, UNKNOWN)
    if isinstance(expr, BoolLiteral):
        return "true" if expr.value else "false"
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, Null):
        return UNKNOWN
    left = _eval(expr.left, b)
    right = _eval(expr.right, b)
    if left == UNKNOWN or right == UNKNOWN:
        return UNKNOWN
    if isinstance(expr, Concat):
        return left + right
    if isinstance(expr, Sum):
        if _INT_RE.match(left) and _INT_RE.match(right):
            return str(int(left) + int(right))
        return UNKNOWN
    if isinstance(expr, Equals):
        return "true" if left == right else "false"
    if isinstance(expr, NotEquals):
        return "false" if left == right else "true"
    raise TypeError(f"not an expression: {expr!r}")


def eval_attribute(attr: IRAttribute, bindings: Mapping[str, str]) -> str:
    value = _eval(attr.value, bindings)
    if value != UNKNOWN and attr.value_map is not None:
        value = attr.value_map.to_canonical(value)
    return value


def identifying_attribute(ctype: str) -> Optional[str]:
    model = CANONICAL_MODEL.get(ctype)
    return model.identifying if model else None


def _describe(res: IRResource) -> str:
    where = f" at line {res.span.start_line}" if not res.span.synthetic else ""
    return f"{res.type_name} resource{where}"


def resource_id(res: IRResource, bindings: Mapping[str, str]) -> str:
    ident = identifying_attribute(res.type_name)
    candidates = (ident,) if ident else _FALLBACK_ID_ATTRS
    expr: Optional[IRExpression] = None
    for name in candidates:
        attr = res.attribute(name)
        if attr is not None:
            expr = attr.value
            break
    if expr is None:
        expr = res.title
    if expr is None:
        raise InferenceError(f"{_describe(res)} has no identifier")
    value = _eval(expr, bindings)
    if value == UNKNOWN:
        raise InferenceError(f"identifier of {_describe(res)} cannot be determined")
    return f"{res.type_name}:{value}"


def resource_attributes(res: IRResource, bindings: Mapping[str, str]) -> dict[str, str]:
    ident = identifying_attribute(res.type_name)
    skip = {ident} if ident else set()
    return {a.name: eval_attribute(a, bindings) for a in res.attributes if a.name not in skip}


@dataclass
class Declaration:
    resource: IRResource
    bindings: dict[str, str]
    # variable name -> index of the assignment that produced its value
    provenance: dict[str, int]


@dataclass
class PathRun:
    decisions: list[tuple[int, str]] = field(default_factory=list)
    declarations: list[Declaration] = field(default_factory=list)
    # (cid, branch taken, determined condition value) for conditionals whose
    # branch disagreed with the value of their condition
    conflicts: list[tuple[int, str, str]] = field(default_factory=list)
    bindings: dict[str, str] = field(default_factory=dict)
    provenance: dict[str, int] = field(default_factory=dict)
    # assignment index -> bindings visible when it ran
    assignment_env: dict[int, dict[str, str]] = field(default_factory=dict)
    assignment_prov: dict[int, dict[str, int]] = field(default_factory=dict)
    condition_env: dict[int, tuple[dict[str, str], dict[str, int]]] = field(default_factory=dict)


Chooser = Callable[[Conditional, str], str]


def execute(script: IRScript, choose: Chooser) -> PathRun:
    """Run the script once; ``choose`` picks the branch of every reached conditional."""
    run = PathRun()
    _exec(script.statements, run, choose)
    return run


def _exec(stmts: tuple[IRStatement, ...], run: PathRun, choose: Chooser) -> None:
    for stmt in stmts:
        if isinstance(stmt, VariableAssignment):
            run.assignment_env[stmt.index] = dict(run.bindings)
            run.assignment_prov[stmt.index] = dict(run.provenance)
            value = _eval(stmt.value, run.bindings)
            if value == UNKNOWN:
                run.bindings.pop(stmt.name, None)
            else:
                run.bindings[stmt.name] = value
            run.provenance[stmt.name] = stmt.index
        elif isinstance(stmt, IRResource):
            run.declarations.append(Declaration(stmt, dict(run.bindings), dict(run.provenance)))
        else:
            value = _eval(stmt.condition, run.bindings)
            run.condition_env[stmt.cid] = (dict(run.bindings), dict(run.provenance))
            taken = choose(stmt, value)
            run.decisions.append((stmt.cid, taken))
            if value != UNKNOWN and (value == "true") != (taken == "then"):
                run.conflicts.append((stmt.cid, taken, value))
            _exec(stmt.then_branch if taken == "then" else stmt.else_branch, run, choose)


def state_of(run: PathRun) -> SystemState:
    merged: dict[str, dict[str, str]] = {}
    for decl in run.declarations:
        rid = resource_id(decl.resource, decl.bindings)
        merged.setdefault(rid, {}).update(resource_attributes(decl.resource, decl.bindings))
    return SystemState(tuple(ResourceState(rid, attrs) for rid, attrs in merged.items()))


def enumerate_runs(script: IRScript, branch_cap: int = DEFAULT_BRANCH_CAP) -> list[PathRun]:
    """Every feasible run, in lexicographic order of branch decisions.

    Determined conditions follow their value; undetermined ones fork with
    ``then`` explored first.
    """
    runs: list[PathRun] = []
    prefix: list[str] = []
    while True:
        forks: list[str] = []

        def choose(cond: Conditional, value: str) -> str:
            if value == "true":
                return "then"
            if value == "false":
                return "else"
            i = len(forks)
            forks.append(prefix[i] if i < len(prefix) else "then")
            return forks[-1]

        runs.append(execute(script, choose))
        if len(runs) > branch_cap:
            raise CapacityError(f"more than {branch_cap} branch combinations")
        # Backtrack to the deepest fork still on 'then'.
        while forks and forks[-1] == "else":
            forks.pop()
        if not forks:
            return runs
        forks[-1] = "else"
        prefix = forks


def infer_states(script: IRScript, branch_cap: int = DEFAULT_BRANCH_CAP) -> list[tuple[SystemState, BranchDecisions]]:
    """Possible system states of a normalized script, deduplicated."""
    out: list[tuple[SystemState, BranchDecisions]] = []
    seen: set[tuple] = set()
    for run in enumerate_runs(script, branch_cap):
        st = state_of(run)
        key = st.key()
        if key in seen:
            continue
        seen.add(key)
        out.append((st, tuple(run.decisions)))
    return out


# --- syscall traces --------------------------------------------------------

TRACE_OPS = ("write", "create", "chmod", "chown", "unlink")

_LINE_RE = re.compile(r"^\s*(?:\[pid\s+\d+\]\s*|\d+\s+)?(?:\d+(?:\.\d+)?\s+)?([a-z_0-9]+)\((.*)\)\s*(?:=.*)?$")
_STRING_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')
_WRITE_FLAGS = ("O_WRONLY", "O_RDWR", "O_CREAT", "O_TRUNC", "O_APPEND")
_SYSCALL_OPS = {
    "creat": "create", "mkdir": "create", "mkdirat": "create",
    "chmod": "chmod", "fchmodat": "chmod",
    "chown": "chown", "lchown": "chown", "fchownat": "chown",
    "unlink": "unlink", "unlinkat": "unlink", "rmdir": "unlink",
}


@dataclass(frozen=True)
class TraceEvent:
    path: str
    op: str

    def __post_init__(self) -> None:
        if not os.path.isabs(self.path):
            raise ValueError(f"trace path must be absolute: {self.path!r}")
        if self.op not in TRACE_OPS:
            raise ValueError(f"unknown trace operation {self.op!r}")


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def parse_trace(text: str) -> tuple[list[TraceEvent], int]:
    """Parse the simplified strace dialect.

    Returns the events of interest and the number of lines that could not be
    parsed. Syscalls that do not modify files are ignored silently.
    """
    events: list[TraceEvent] = []
    skipped = 0
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith(("+++", "---")):
            continue
        m = _LINE_RE.match(line)
        if m is None:
            skipped += 1
            continue
        name, args = m.groups()
        paths = [_unescape(p) for p in _STRING_RE.findall(args)]
        if name in ("open", "openat"):
            if not any(flag in args for flag in _WRITE_FLAGS):
                continue
            op = "create" if "O_CREAT" in args else "write"
            paths = paths[:1]
        elif name in ("rename", "renameat", "renameat2"):
            if len(paths) < 2:
                skipped += 1
                continue
            for path, op in ((paths[0], "unlink"), (paths[1], "create")):
                if os.path.isabs(path):
                    events.append(TraceEvent(path, op))
                else:
                    skipped += 1
            continue
        elif name in ("symlink", "symlinkat", "link", "linkat"):
            # The created path is the last string argument.
            op = "create"
            paths = paths[-1:] if len(paths) >= 2 else []
        elif name in _SYSCALL_OPS:
            op = _SYSCALL_OPS[name]
            paths = paths[:1]
        else:
            continue
        if not paths or not os.path.isabs(paths[0]):
            skipped += 1
            continue
        events.append(TraceEvent(paths[0], op))
    return events, skipped


def _owner(uid: int) -> str:
    try:
        return pwd.getpwuid(uid).pw_name
    except KeyError:
        return str(uid)


def _group(gid: int) -> str:
    try:
        return grp.getgrgid(gid).gr_name
    except KeyError:
        return str(gid)


def probe_file(path: str, fs_root: str, content_hash: bool = False) -> dict[str, str]:
    real = os.path.join(fs_root, path.lstrip("/"))
    try:
        st = os.lstat(real)
    except FileNotFoundError:
        return {"state": "absent"}
    attrs: dict[str, str] = {}
    if stat.S_ISLNK(st.st_mode):
        attrs["state"] = "link"
        attrs["target"] = os.readlink(real)
    elif stat.S_ISDIR(st.st_mode):
        attrs["state"] = "directory"
    else:
        attrs["state"] = "present"
    attrs["owner"] = _owner(st.st_uid)
    attrs["group"] = _group(st.st_gid)
    attrs["mode"] = format(stat.S_IMODE(st.st_mode), "04o")
    if content_hash and attrs["state"] == "present":
        with open(real, "rb") as fh:
            attrs["checksum"] = "sha256:" + hashlib.sha256(fh.read()).hexdigest()
    return attrs


def infer_from_trace(trace: str, fs_root: str = "/", content_hash: bool = False) -> SystemState:
    """Desired state of the files touched by a trace, read back from ``fs_root``."""
    if not os.path.isdir(fs_root) or not os.access(fs_root, os.R_OK | os.X_OK):
        raise OSError(f"filesystem root {fs_root!r} is not a readable directory")
    events, skipped = parse_trace(trace)
    if skipped:
        log.warning("skipped %d unparsable trace line(s)", skipped)
    paths = list(dict.fromkeys(ev.path for ev in events))
    return SystemState(tuple(
        ResourceState(f"file:{p}", probe_file(p, fs_root, content_hash)) for p in paths
    ))

