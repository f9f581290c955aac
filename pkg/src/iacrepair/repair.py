"""Minimal-edit repair of a normalized script against a desired state.

The search runs per branch path. Along a path the first unmet requirement
(a conditional that has to flip, a missing resource, a wrong or missing
attribute) is picked and each single edit able to discharge it becomes a
child node. Iterative deepening over total cost makes the first level that
yields verified solutions the minimal one.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

from .infer import (
    DEFAULT_BRANCH_CAP,
    CapacityError,
    Declaration,
    InferenceError,
    PathRun,
    enumerate_runs,
    eval_attribute,
    eval_expression,
    execute,
    identifying_attribute,
    infer_states,
    resource_id,
)
from .ir import (
    BINARY_TYPES,
    LITERAL_TYPES,
    SYNTHETIC_SPAN,
    UNKNOWN,
    Concat,
    Conditional,
    IRAttribute,
    IRExpression,
    IRResource,
    IRScript,
    IRStatement,
    Null,
    Span,
    StringLiteral,
    Sum,
    VariableAssignment,
    VariableReference,
    iter_statements,
    literal_leaves,
    render_literal,
    variables_of,
)
from .normalize import CANONICAL_MODEL, closed_values
from .state import MISSING_RESOURCE, ResourceState, SystemState, diff, satisfies


# --- edit sites ------------------------------------------------------------

@dataclass(frozen=True)
class AttributeValue:
    resource: int
    resource_id: str
    attribute: str
    span: Span


@dataclass(frozen=True)
class VariableLiteral:
    assignment: int
    variable: str
    span: Span


@dataclass(frozen=True)
class ConditionLiteral:
    cid: int
    span: Span


@dataclass(frozen=True)
class MissingAttribute:
    # -1 when the attribute belongs to a resource inserted by the same solution
    resource: int
    resource_id: str
    attribute: str
    span: Span = SYNTHETIC_SPAN


@dataclass(frozen=True)
class MissingResource:
    resource_id: str
    span: Span = SYNTHETIC_SPAN


EditSite = Union[AttributeValue, VariableLiteral, ConditionLiteral, MissingAttribute, MissingResource]
_MISSING = (MissingAttribute, MissingResource)


@dataclass(frozen=True)
class Edit:
    site: EditSite
    new_value: str
    cost: int = 1

    def sort_key(self) -> tuple:
        if isinstance(self.site, MissingResource):
            return (math.inf, self.site.resource_id, 0, "", self.new_value)
        if isinstance(self.site, MissingAttribute):
            return (math.inf, self.site.resource_id, 1, self.site.attribute, self.new_value)
        return (self.site.span.byte_start, "", 0, repr(self.site), self.new_value)

    def describe(self) -> str:
        s = self.site
        if isinstance(s, AttributeValue):
            return f"set {s.resource_id}.{s.attribute} = {self.new_value!r} (line {s.span.start_line})"
        if isinstance(s, VariableLiteral):
            return f"set variable {s.variable} = {self.new_value!r} (line {s.span.start_line})"
        if isinstance(s, ConditionLiteral):
            return f"set condition literal = {self.new_value!r} (line {s.span.start_line})"
        if isinstance(s, MissingAttribute):
            return f"add {s.resource_id}.{s.attribute} = {self.new_value!r}"
        return f"add resource {s.resource_id}"


@dataclass(frozen=True)
class RepairSolution:
    edits: tuple[Edit, ...]
    total_cost: int
    branch_decisions: tuple[tuple[int, str], ...] = ()

    def sort_key(self) -> tuple:
        first = min((e.sort_key()[0] for e in self.edits), default=-1)
        return (self.total_cost, first, tuple(e.sort_key() for e in self.edits))


@dataclass(frozen=True)
class RepairConfig:
    max_solutions: int = 10
    timeout_seconds: float = 120.0
    max_cost: int = 8
    allow_resource_insertion: bool = True
    # Replacing a non-literal attribute expression with a literal.
    allow_expression_edit: bool = True
    branch_cap: int = DEFAULT_BRANCH_CAP

    def __post_init__(self) -> None:
        if self.max_solutions <= 0 or self.timeout_seconds <= 0 or self.max_cost <= 0 or self.branch_cap <= 0:
            raise ValueError("repair limits must be positive")


class EngineError(RuntimeError):
    pass


class RepairTimeout(TimeoutError):
    def __init__(self, solutions: list[RepairSolution]):
        super().__init__(f"repair timed out with {len(solutions)} solution(s)")
        self.solutions = solutions


class _Deadline(Exception):
    pass


# --- applying edits in memory ----------------------------------------------

def _replace_leaf(expr: IRExpression, span: Span, new: IRExpression) -> IRExpression:
    if expr.span == span and isinstance(expr, LITERAL_TYPES):
        return new
    if isinstance(expr, BINARY_TYPES):
        return replace(expr, left=_replace_leaf(expr.left, span, new), right=_replace_leaf(expr.right, span, new))
    return expr


def apply_edits(script: IRScript, edits: Iterable[Edit]) -> IRScript:
    """Return the script with ``edits`` applied to its (normalized) IR."""
    attr_values: dict[tuple[int, str], str] = {}
    var_values: dict[int, str] = {}
    cond_values: dict[tuple[int, Span], str] = {}
    added: dict[int, list[tuple[str, str]]] = {}
    new_resources: dict[str, list[tuple[str, str]]] = {}
    for e in edits:
        s = e.site
        if isinstance(s, AttributeValue):
            attr_values[(s.resource, s.attribute)] = e.new_value
        elif isinstance(s, VariableLiteral):
            var_values[s.assignment] = e.new_value
        elif isinstance(s, ConditionLiteral):
            cond_values[(s.cid, s.span)] = e.new_value
        elif isinstance(s, MissingResource):
            new_resources.setdefault(s.resource_id, [])
        elif s.resource >= 0:
            added.setdefault(s.resource, []).append((s.attribute, e.new_value))
    for e in edits:
        s = e.site
        if isinstance(s, MissingAttribute) and s.resource < 0:
            if s.resource_id not in new_resources:
                raise EngineError(f"attribute added to {s.resource_id!r} without inserting it")
            new_resources[s.resource_id].append((s.attribute, e.new_value))

    def rewrite(stmts: tuple[IRStatement, ...]) -> tuple[IRStatement, ...]:
        out: list[IRStatement] = []
        for stmt in stmts:
            if isinstance(stmt, IRResource):
                attrs = []
                for attr in stmt.attributes:
                    key = (stmt.index, attr.name)
                    if key in attr_values:
                        attr = replace(attr, value=StringLiteral(attr_values[key]))
                    attrs.append(attr)
                for name, value in sorted(added.get(stmt.index, ())):
                    attrs.append(IRAttribute(name, StringLiteral(value), synthetic=True))
                stmt = replace(stmt, attributes=tuple(attrs))
            elif isinstance(stmt, VariableAssignment):
                if stmt.index in var_values:
                    stmt = replace(stmt, value=StringLiteral(var_values[stmt.index]))
            else:
                cond = stmt.condition
                for (cid, span), value in cond_values.items():
                    if cid == stmt.cid:
                        cond = _replace_leaf(cond, span, StringLiteral(value))
                stmt = replace(stmt, condition=cond, then_branch=rewrite(stmt.then_branch),
                               else_branch=rewrite(stmt.else_branch))
            out.append(stmt)
        return tuple(out)

    stmts = list(rewrite(script.statements))
    for rid in sorted(new_resources):
        ctype, _, ident = rid.partition(":")
        attrs = tuple(IRAttribute(n, StringLiteral(v), synthetic=True) for n, v in sorted(new_resources[rid]))
        stmts.append(IRResource(ctype, StringLiteral(ident), attrs))
    return replace(script, statements=tuple(stmts))


def verify_solution(script: IRScript, solution: Union[RepairSolution, Iterable[Edit]], desired: SystemState,
                    branch_cap: int = DEFAULT_BRANCH_CAP) -> bool:
    """True iff some inferred state of the patched IR satisfies ``desired``."""
    edits = solution.edits if isinstance(solution, RepairSolution) else tuple(solution)
    try:
        patched = apply_edits(script, edits)
        states = infer_states(patched, branch_cap)
    except (InferenceError, EngineError):
        return False
    return any(satisfies(st, desired) for st, _ in states)


# --- site collection -------------------------------------------------------

def _known_ids(script: IRScript) -> dict[int, str]:
    ids: dict[int, str] = {}
    try:
        runs = enumerate_runs(script)
    except CapacityError:
        runs = []
    for run in runs:
        for decl in run.declarations:
            if decl.resource.index not in ids:
                try:
                    ids[decl.resource.index] = resource_id(decl.resource, decl.bindings)
                except InferenceError:
                    pass
    return ids


def collect_sites(script: IRScript) -> list[EditSite]:
    """Static edit sites of a normalized script.

    Identifying attributes are not sites: they define which resource a
    declaration is, not its state. Missing-resource sites depend on the
    desired state and are produced during search.
    """
    ids = _known_ids(script)
    sites: list[EditSite] = []
    for stmt in iter_statements(script.statements):
        if isinstance(stmt, IRResource):
            model = CANONICAL_MODEL.get(stmt.type_name)
            if model is None:
                continue
            rid = ids.get(stmt.index, f"{stmt.type_name}:?")
            for attr in stmt.attributes:
                if attr.name != model.identifying:
                    sites.append(AttributeValue(stmt.index, rid, attr.name, attr.value.span))
            present = {a.name for a in stmt.attributes}
            for name in model.settable:
                if name not in present:
                    sites.append(MissingAttribute(stmt.index, rid, name))
        elif isinstance(stmt, VariableAssignment):
            if literal_leaves(stmt.value):
                sites.append(VariableLiteral(stmt.index, stmt.name, stmt.value.span))
        else:
            for leaf in literal_leaves(stmt.condition):
                sites.append(ConditionLiteral(stmt.cid, leaf.span))
    return sites


# --- search ----------------------------------------------------------------

def _structural_paths(script: IRScript, limit: int) -> list[dict[int, str]]:
    """Branch vectors ignoring condition values, lexicographic, at most ``limit``."""
    out: list[dict[int, str]] = []
    prefix: list[str] = []
    while len(out) < limit:
        forks: list[str] = []
        seen: dict[int, str] = {}

        def choose(cond: Conditional, value: str) -> str:
            i = len(forks)
            forks.append(prefix[i] if i < len(prefix) else "then")
            seen[cond.cid] = forks[-1]
            return forks[-1]

        execute(script, choose)
        out.append(dict(seen))
        while forks and forks[-1] == "else":
            forks.pop()
        if not forks:
            break
        forks[-1] = "else"
        prefix = forks
    return out


def _edits_cost(edits: Iterable[Edit]) -> int:
    return sum(e.cost for e in edits)


def _consistent(edits: frozenset[Edit]) -> bool:
    seen: dict[EditSite, str] = {}
    for e in edits:
        if seen.setdefault(e.site, e.new_value) != e.new_value:
            return False
    return True


class _Search:
    def __init__(self, script: IRScript, desired: SystemState, cfg: RepairConfig, deadline: float):
        self.script = script
        self.desired = desired
        self.cfg = cfg
        self.deadline = deadline
        self.assignments = {s.index: s for s in iter_statements(script.statements)
                            if isinstance(s, VariableAssignment)}
        self.conditionals = {s.cid: s for s in iter_statements(script.statements)
                             if isinstance(s, Conditional)}
        pool = {v for r in desired for v in r.attributes.values()}
        for stmt in iter_statements(script.statements):
            exprs: list[IRExpression] = []
            if isinstance(stmt, Conditional):
                exprs.append(stmt.condition)
            elif isinstance(stmt, VariableAssignment):
                exprs.append(stmt.value)
            for e in exprs:
                pool.update(render_literal(leaf) for leaf in literal_leaves(e) if not isinstance(leaf, Null))
        self.value_pool = sorted(pool)
        self.cache: dict[frozenset[Edit], IRScript] = {}
        self.found: dict[frozenset[Edit], RepairSolution] = {}
        self.cutoff = False

    def tick(self) -> None:
        if time.monotonic() > self.deadline:
            raise _Deadline

    def patched(self, edits: frozenset[Edit]) -> IRScript:
        hit = self.cache.get(edits)
        if hit is None:
            if len(self.cache) > 4096:
                self.cache.clear()
            hit = apply_edits(self.script, edits) if edits else self.script
            self.cache[edits] = hit
        return hit

    # requirement analysis
    def first_violation(self, run: PathRun) -> Optional[list[tuple[Edit, ...]]]:
        if run.conflicts:
            cid, taken, _ = run.conflicts[0]
            return self.flip_alternatives(run, cid, taken)
        by_id: dict[str, list[Declaration]] = {}
        for decl in run.declarations:
            try:
                rid = resource_id(decl.resource, decl.bindings)
            except InferenceError:
                continue
            by_id.setdefault(rid, []).append(decl)
        for want in self.desired:
            decls = by_id.get(want.id)
            if not decls:
                return self.insertion_alternatives(want)
            for name, value in want.attributes.items():
                writer = None
                attr = None
                for decl in reversed(decls):
                    attr = decl.resource.attribute(name)
                    if attr is not None:
                        writer = decl
                        break
                if writer is None or attr is None:
                    if not self.valid_value(want.type, name, value):
                        return []
                    target = decls[-1].resource
                    return [(Edit(MissingAttribute(target.index, want.id, name), value),)]
                if eval_attribute(attr, writer.bindings) == value:
                    continue
                return self.attribute_alternatives(want, writer, attr, value, run)
        return None

    def valid_value(self, ctype: str, attr: str, value: str) -> bool:
        closed = closed_values(ctype, attr)
        return closed is None or value in closed

    def insertion_alternatives(self, want: ResourceState) -> list[tuple[Edit, ...]]:
        if not self.cfg.allow_resource_insertion or want.type not in CANONICAL_MODEL:
            return []
        if not all(self.valid_value(want.type, k, v) for k, v in want.attributes.items()):
            return []
        ident = identifying_attribute(want.type)
        edits = [Edit(MissingResource(want.id), want.id)]
        for name, value in want.attributes.items():
            if name == ident:
                continue
            edits.append(Edit(MissingAttribute(-1, want.id, name), value))
        return [tuple(edits)]

    def attribute_alternatives(self, want: ResourceState, decl: Declaration, attr: IRAttribute,
                               value: str, run: PathRun) -> list[tuple[Edit, ...]]:
        out: list[Edit] = []
        expr = attr.value
        literal = isinstance(expr, LITERAL_TYPES) and not getattr(expr, "fragment", False)
        if self.valid_value(want.type, attr.name, value) and (literal or self.cfg.allow_expression_edit):
            out.append(Edit(AttributeValue(decl.resource.index, want.id, attr.name, expr.span), value))
        if not literal:
            raw = attr.value_map.to_raw(value) if attr.value_map else value
            out.extend(self.solve(expr, raw, decl.bindings, decl.provenance, run))
        return [(e,) for e in dict.fromkeys(out)]

    def flip_alternatives(self, run: PathRun, cid: int, taken: str) -> list[tuple[Edit, ...]]:
        cond = self.conditionals[cid]
        bindings, prov = run.condition_env[cid]
        expr = cond.condition
        if not isinstance(expr, BINARY_TYPES) or isinstance(expr, (Concat, Sum)):
            return []
        want_equal = (taken == "then") == (type(expr).__name__ == "Equals")
        out: list[Edit] = []
        for side, other in ((expr.left, expr.right), (expr.right, expr.left)):
            other_value = eval_expression(other, bindings)
            if other_value == UNKNOWN:
                continue
            target = other_value if want_equal else self.distinct_value(other_value)
            if isinstance(side, LITERAL_TYPES) and not isinstance(side, Null):
                out.append(Edit(ConditionLiteral(cid, side.span), target))
            else:
                out.extend(self.solve(side, target, bindings, prov, run))
        return [(e,) for e in dict.fromkeys(out)]

    def distinct_value(self, value: str) -> str:
        for candidate in self.value_pool:
            if candidate != value:
                return candidate
        return value + "-other"

    def solve(self, expr: IRExpression, target: str, bindings: dict[str, str], prov: dict[str, int],
              run: PathRun, depth: int = 0) -> list[Edit]:
        """Single edits making ``expr`` evaluate to ``target`` (string-equation propagation)."""
        if depth > 32:
            return []
        if isinstance(expr, VariableReference):
            idx = prov.get(expr.name)
            if idx is None:
                return []  # undefined variable
            assign = self.assignments[idx]
            out: list[Edit] = []
            if literal_leaves(assign.value):
                out.append(Edit(VariableLiteral(idx, assign.name, assign.value.span), target))
            if not isinstance(assign.value, LITERAL_TYPES) and idx in run.assignment_env:
                out.extend(self.solve(assign.value, target, run.assignment_env[idx],
                                      run.assignment_prov[idx], run, depth + 1))
            return out
        if isinstance(expr, Concat):
            left = eval_expression(expr.left, bindings)
            right = eval_expression(expr.right, bindings)
            out = []
            if left != UNKNOWN and target.startswith(left):
                out.extend(self.solve(expr.right, target[len(left):], bindings, prov, run, depth + 1))
            if right != UNKNOWN and target.endswith(right):
                out.extend(self.solve(expr.left, target[:len(target) - len(right)], bindings, prov, run, depth + 1))
            return out
        if isinstance(expr, Sum):
            try:
                goal = int(target)
            except ValueError:
                return []
            out = []
            for side, other in ((expr.left, expr.right), (expr.right, expr.left)):
                ov = eval_expression(other, bindings)
                try:
                    known = int(ov)
                except ValueError:
                    continue
                out.extend(self.solve(side, str(goal - known), bindings, prov, run, depth + 1))
            return out
        return []

    # driver
    def dfs(self, path: dict[int, str], edits: frozenset[Edit], budget: int, visited: set) -> None:
        self.tick()
        if edits in visited:
            return
        visited.add(edits)
        script = self.patched(edits)
        run = execute(script, lambda cond, value: path.get(cond.cid, "then"))
        alternatives = self.first_violation(run)
        if alternatives is None:
            self.record(edits, run)
            return
        for alt in alternatives:
            new = edits.union(alt)
            if new == edits or not _consistent(new):
                continue
            if _edits_cost(new) > budget:
                self.cutoff = True
                continue
            self.dfs(path, new, budget, visited)

    def record(self, edits: frozenset[Edit], run: PathRun) -> None:
        if edits in self.found:
            return
        for other in self.found:
            if other < edits:
                return
        if not verify_solution(self.script, edits, self.desired, self.cfg.branch_cap):
            return
        ordered = tuple(sorted(edits, key=Edit.sort_key))
        self.found[edits] = RepairSolution(ordered, _edits_cost(edits), tuple(run.decisions))


def _strip_identifiers(desired: SystemState) -> SystemState:
    out = []
    for res in desired:
        ident = identifying_attribute(res.type)
        attrs = dict(res.attributes)
        if ident in attrs and attrs[ident] == res.identifier:
            del attrs[ident]
        out.append(ResourceState(res.id, attrs))
    return SystemState(tuple(out))


def repair(script: IRScript, desired: SystemState, cfg: Optional[RepairConfig] = None) -> list[RepairSolution]:
    """Cost-ordered verified repairs of a normalized script.

    Raises :class:`RepairTimeout` (carrying the solutions found so far) when
    the deadline passes, and :class:`CapacityError` / :class:`InferenceError`
    when the script itself cannot be evaluated.
    """
    cfg = cfg or RepairConfig()
    deadline = time.monotonic() + cfg.timeout_seconds
    desired = _strip_identifiers(desired)
    natural = [dict(run.decisions) for run in enumerate_runs(script, cfg.branch_cap)]
    paths = list(natural)
    for p in _structural_paths(script, cfg.branch_cap):
        if len(paths) >= cfg.branch_cap:
            break
        if p not in paths:
            paths.append(p)
    search = _Search(script, desired, cfg, deadline)
    results: list[RepairSolution] = []
    try:
        for budget in range(cfg.max_cost + 1):
            search.cutoff = False
            before = set(search.found)
            for path in paths:
                search.dfs(path, frozenset(), budget, set())
            fresh = sorted((s for k, s in search.found.items() if k not in before), key=RepairSolution.sort_key)
            results.extend(fresh)
            if len(results) >= cfg.max_solutions or not search.cutoff:
                break
    except _Deadline:
        pending = sorted((s for s in search.found.values() if s not in results), key=RepairSolution.sort_key)
        raise RepairTimeout((results + pending)[: cfg.max_solutions]) from None
    except RecursionError:
        raise EngineError("search recursion limit exceeded") from None
    return results[: cfg.max_solutions]


# --- failure classification --------------------------------------------------

FAILURE_CLASSES = {
    "undefined-variable": "a desired attribute is computed from a variable that is never defined",
    "shared-variable-conflict": "attributes share a variable and need incompatible values",
    "array-title": "the script declares several resources with an array title",
    "insertion-disabled": "a desired resource is absent and resource insertion is disabled",
    "unsupported-resource": "a desired resource has a type without a canonical model",
    "invalid-value": "a desired value lies outside the attribute's closed value set",
    "unknown-identifier": "a resource identifier cannot be evaluated",
    "branch-capacity": "the script has more branch combinations than the configured cap",
    "parse-error": "the script cannot be parsed",
    "cost-limit": "every repair needs more edits than the configured maximum",
    "timeout": "the deadline elapsed before any solution was verified",
    "engine-fault": "the repair engine raised an unexpected error",
}


def classify_failure(script: IRScript, desired: SystemState, cfg: Optional[RepairConfig] = None) -> str:
    """Best-effort cause for a repair that produced no solution."""
    cfg = cfg or RepairConfig()
    try:
        runs = enumerate_runs(script, cfg.branch_cap)
    except CapacityError:
        return "branch-capacity"
    desired = _strip_identifiers(desired)
    best: Optional[tuple[int, PathRun, list]] = None
    for run in runs:
        try:
            from .infer import state_of
            st = state_of(run)
        except InferenceError:
            return "unknown-identifier"
        d = diff(st, desired)
        if best is None or len(d) < best[0]:
            best = (len(d), run, d)
    if best is None:
        return "cost-limit"
    _, run, mismatches = best
    readers: dict[int, set[tuple[str, str]]] = {}
    decl_attr: dict[tuple[str, str], tuple[Declaration, IRAttribute]] = {}
    for decl in run.declarations:
        try:
            rid = resource_id(decl.resource, decl.bindings)
        except InferenceError:
            continue
        for attr in decl.resource.attributes:
            decl_attr[(rid, attr.name)] = (decl, attr)
            for var in variables_of(attr.value):
                if var in decl.provenance:
                    readers.setdefault(decl.provenance[var], set()).add((rid, attr.name))
    for rid, attr, expected, found in mismatches:
        ctype = rid.partition(":")[0]
        if found == MISSING_RESOURCE:
            if not cfg.allow_resource_insertion:
                return "insertion-disabled"
            if ctype not in CANONICAL_MODEL:
                return "unsupported-resource"
            want = desired.get(rid)
            if want and any(closed_values(ctype, k) and v not in closed_values(ctype, k)
                            for k, v in want.attributes.items()):
                return "invalid-value"
            continue
        closed = closed_values(ctype, attr or "")
        if closed is not None and expected not in closed:
            return "invalid-value"
        if found == UNKNOWN:
            return "undefined-variable"
        entry = decl_attr.get((rid, attr or ""))
        if entry is not None:
            decl, node = entry
            for var in variables_of(node.value):
                idx = decl.provenance.get(var)
                if idx is not None and len(readers.get(idx, ())) > 1:
                    return "shared-variable-conflict"
                if idx is None:
                    return "undefined-variable"
    return "cost-limit"


# --- serialization -------------------------------------------------------------

_SITE_KINDS = {cls.__name__: cls for cls in (AttributeValue, VariableLiteral, ConditionLiteral,
                                             MissingAttribute, MissingResource)}


def edit_to_json(edit: Edit) -> dict:
    site = {k: getattr(edit.site, k) for k in edit.site.__dataclass_fields__}
    site["span"] = [getattr(site["span"], f) for f in Span.__dataclass_fields__]
    return {"kind": type(edit.site).__name__, "site": site, "new_value": edit.new_value, "cost": edit.cost}


def edit_from_json(data: dict) -> Edit:
    site = dict(data["site"])
    site["span"] = Span(*site["span"])
    return Edit(_SITE_KINDS[data["kind"]](**site), data["new_value"], data.get("cost", 1))


def solution_to_json(solution: RepairSolution) -> dict:
    return {
        "total_cost": solution.total_cost,
        "branch_decisions": [list(d) for d in solution.branch_decisions],
        "edits": [edit_to_json(e) for e in solution.edits],
    }


def solution_from_json(data: dict) -> RepairSolution:
    edits = tuple(edit_from_json(e) for e in data["edits"])
    return RepairSolution(edits, data["total_cost"], tuple((c, b) for c, b in data["branch_decisions"]))
