"""Mutation-based repair scenarios and the evaluation pipeline around them."""

from __future__ import annotations

import json
import logging
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

from .frontends import ParseError, detect_tech, parse
from .infer import CapacityError, InferenceError, identifying_attribute, infer_states
from .ir import UNKNOWN, IRScript, Tech
from .normalize import CANONICAL_MODEL, normalize_script
from .patcher import PatchError, patch_source
from .repair import (
    RepairConfig,
    RepairSolution,
    RepairTimeout,
    classify_failure,
    repair,
    solution_from_json,
    solution_to_json,
    verify_solution,
)
from .state import ResourceState, SystemState, parse_state, satisfies

log = logging.getLogger(__name__)

STATUSES = ("Passed", "Failed", "Error", "Timeout")

_OWNERS = ("root", "daemon", "www-data")
_SUFFIXED = ("target", "home")


def default_pools() -> dict[tuple[str, str], tuple[str, ...]]:
    pools: dict[tuple[str, str], tuple[str, ...]] = {}
    for ctype, model in CANONICAL_MODEL.items():
        for attr in model.attributes:
            if attr.values is not None:
                pools[(ctype, attr.name)] = tuple(sorted(attr.values))
    pools.update({
        ("file", "owner"): _OWNERS,
        ("file", "group"): _OWNERS,
        ("file", "mode"): ("0644", "0600", "0755", "0700"),
        ("file", "content"): ("managed", "placeholder"),
        ("package", "version"): ("1.0.0", "2.0.0"),
        ("user", "uid"): ("1000", "1001", "2000"),
        ("user", "gid"): _OWNERS,
        ("user", "shell"): ("/bin/bash", "/bin/sh", "/usr/sbin/nologin"),
    })
    return pools


@dataclass(frozen=True)
class MutationConfig:
    mutations_min: int = 1
    mutations_max: int = 3
    scenarios_per_state: int = 25
    seed: int = 42
    value_pools: Mapping[tuple[str, str], tuple[str, ...]] = field(default_factory=default_pools)

    def __post_init__(self) -> None:
        if not 1 <= self.mutations_min <= self.mutations_max:
            raise ValueError("mutation range must satisfy 1 <= min <= max")
        if self.scenarios_per_state <= 0:
            raise ValueError("scenarios_per_state must be positive")
        for key, pool in self.value_pools.items():
            if not pool:
                raise ValueError(f"empty value pool for {key}")

    def candidates(self, ctype: str, attr: str, current: str) -> list[str]:
        if attr in _SUFFIXED:
            pool: Sequence[str] = (current + ".bak", current + ".new")
        else:
            pool = self.value_pools.get((ctype, attr), ())
        return [v for v in pool if v != current]


class GenerationSkip(ValueError):
    """The script yields no mutable attribute, so no scenario can be built."""


Mutation = tuple[str, str, str, str]  # (resource id, attribute, old, new)


@dataclass(frozen=True)
class Scenario:
    script_path: str
    tech: Tech
    desired: SystemState
    origin: tuple[int, tuple[Mutation, ...]]
    seed: int
    source: str = field(default="", repr=False, compare=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "script": self.script_path,
            "tech": self.tech.value,
            "seed": self.seed,
            "state_index": self.origin[0],
            "mutations": [list(m) for m in self.origin[1]],
            "desired": self.desired.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], source: str = "") -> "Scenario":
        return cls(
            data["script"], Tech(data["tech"]), parse_state(json.dumps(data["desired"])),
            (data["state_index"], tuple(tuple(m) for m in data["mutations"])), data["seed"], source,
        )

    def load_source(self) -> str:
        if self.source:
            return self.source
        return Path(self.script_path).read_text(encoding="utf-8")


def _known(res: ResourceState) -> dict[str, str]:
    return {k: v for k, v in res.attributes.items() if v != UNKNOWN}


def generate_scenarios(script: IRScript, cfg: MutationConfig, script_path: str = "",
                       source: str = "") -> list[Scenario]:
    """Scenarios from every inferred state of a normalized script.

    Each state gets ``scenarios_per_state`` draws from its own seeded stream
    (seed, script path, state index), so results do not depend on how files
    are distributed over workers.
    """
    states = [st for st, _ in infer_states(script)]
    out: list[Scenario] = []
    seen: set[tuple] = set()
    any_target = False
    for index, st in enumerate(states):
        targets: list[tuple[str, str, str, list[str]]] = []
        for res in st:
            if res.type not in CANONICAL_MODEL:
                continue
            ident = identifying_attribute(res.type)
            for attr, value in sorted(_known(res).items()):
                if attr == ident or CANONICAL_MODEL[res.type].attribute(attr) is None:
                    continue
                cands = cfg.candidates(res.type, attr, value)
                if cands:
                    targets.append((res.id, attr, value, cands))
        if not targets:
            continue
        any_target = True
        rng = random.Random(f"{cfg.seed}:{script_path}:{index}")
        base = {res.id: _known(res) for res in st}
        for _ in range(cfg.scenarios_per_state):
            k = min(rng.randint(cfg.mutations_min, cfg.mutations_max), len(targets))
            picked = rng.sample(range(len(targets)), k)
            mutations: list[Mutation] = []
            attrs = {rid: dict(a) for rid, a in base.items()}
            for i in sorted(picked):
                rid, attr, old, cands = targets[i]
                new = rng.choice(cands)
                attrs[rid][attr] = new
                mutations.append((rid, attr, old, new))
            desired = SystemState(tuple(ResourceState(rid, a) for rid, a in attrs.items()))
            key = desired.key()
            if key in seen or any(satisfies(other, desired) for other in states):
                continue
            seen.add(key)
            out.append(Scenario(script_path, script.tech, desired, (index, tuple(mutations)), cfg.seed, source))
    if not any_target:
        raise GenerationSkip(f"{script_path or 'script'}: no mutable attributes")
    return out


# --- running -----------------------------------------------------------------

@dataclass
class ScenarioOutcome:
    status: str
    solutions_found: int
    wall_time: float
    failure_class: Optional[str] = None
    cost: Optional[int] = None
    # Emitted solutions that failed verification or the patch closure check.
    unsound: int = 0
    message: str = ""
    solution: Optional[RepairSolution] = field(default=None, repr=False)


Engine = Callable[[IRScript, SystemState, RepairConfig], list[RepairSolution]]


def check_closure(script: IRScript, solution: RepairSolution, desired: SystemState) -> bool:
    """Patch the text, re-parse, re-normalize, re-infer and test satisfaction."""
    try:
        text = patch_source(script, solution)
        again = normalize_script(parse(text, script.tech))
        states = infer_states(again)
    except (PatchError, ParseError, InferenceError):
        return False
    return any(satisfies(st, desired) for st, _ in states)


def run_scenario(scenario: Scenario, cfg: Optional[RepairConfig] = None, engine: Engine = repair) -> ScenarioOutcome:
    cfg = cfg or RepairConfig()
    start = time.perf_counter()

    def done(status: str, **kw: Any) -> ScenarioOutcome:
        return ScenarioOutcome(status, wall_time=time.perf_counter() - start, **kw)

    try:
        script = normalize_script(parse(scenario.load_source(), scenario.tech))
    except ParseError as exc:
        cls = "array-title" if exc.kind == "unsupported-array-title" else "parse-error"
        return done("Error", solutions_found=0, failure_class=cls, message=str(exc))
    timed_out = False
    try:
        solutions = engine(script, scenario.desired, cfg)
    except RepairTimeout as exc:
        solutions = exc.solutions
        timed_out = True
    except CapacityError as exc:
        return done("Error", solutions_found=0, failure_class="branch-capacity", message=str(exc))
    except InferenceError as exc:
        return done("Error", solutions_found=0, failure_class="unknown-identifier", message=str(exc))
    except Exception as exc:  # the engine must never take the harness down
        return done("Error", solutions_found=0, failure_class="engine-fault", message=f"{type(exc).__name__}: {exc}")
    good: list[RepairSolution] = []
    unsound = 0
    for sol in solutions:
        if verify_solution(script, sol, scenario.desired, cfg.branch_cap) and check_closure(script, sol, scenario.desired):
            good.append(sol)
        else:
            unsound += 1
    if good:
        return done("Passed", solutions_found=len(good), cost=good[0].total_cost, unsound=unsound, solution=good[0])
    if timed_out:
        return done("Timeout", solutions_found=0, failure_class="timeout", unsound=unsound)
    try:
        cls = classify_failure(script, scenario.desired, cfg)
    except Exception:  # classification is diagnostic only
        cls = "cost-limit"
    return done("Failed", solutions_found=0, failure_class=cls, unsound=unsound)


# --- suites ------------------------------------------------------------------

@dataclass
class ScenarioRecord:
    script: str
    benchmark: str
    tech: str
    state_index: int
    mutations: list[list[str]]
    status: str
    failure_class: Optional[str]
    solutions_found: int
    cost: Optional[int]
    wall_time: float
    unsound: int
    edits: list[str] = field(default_factory=list)
    solution: Optional[dict] = None


@dataclass
class SuiteReport:
    records: list[ScenarioRecord] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)
    soundness_violations: list[str] = field(default_factory=list)

    def counts(self, benchmark: Optional[str] = None) -> dict[str, int]:
        c = Counter(r.status for r in self.records if benchmark is None or r.benchmark == benchmark)
        return {s: c.get(s, 0) for s in STATUSES}

    def benchmarks(self) -> list[str]:
        return sorted({r.benchmark for r in self.records})

    def totals(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for name in self.benchmarks() + ["total"]:
            counts = self.counts(None if name == "total" else name)
            n = sum(counts.values())
            row: dict[str, float] = {"total": n}
            for s in STATUSES:
                row[s] = counts[s]
                row[s + " %"] = round(100.0 * counts[s] / n, 2) if n else 0.0
            out[name] = row
        return out

    @property
    def pass_rate(self) -> float:
        n = len(self.records)
        return self.counts()["Passed"] / n if n else 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "totals": self.totals(),
            "skipped": self.skipped,
            "soundness_violations": self.soundness_violations,
            "records": [asdict(r) for r in self.records],
        }

    def table(self) -> str:
        header = f"{'Benchmark':<12}{'Total':>8}{'Passed':>9}{'Failed':>9}{'Error':>9}{'Timeout':>9}"
        lines = [header, "-" * len(header)]
        for name, row in self.totals().items():
            lines.append(f"{name:<12}{int(row['total']):>8}" + "".join(f"{row[s + ' %']:>8.1f}%" for s in STATUSES))
        return "\n".join(lines)


def corpus_files(corpus: os.PathLike | str) -> list[Path]:
    root = Path(corpus)
    if not root.is_dir():
        return []
    return sorted(p for p in root.rglob("*") if p.is_file() and detect_tech(p) is not None)


def benchmark_of(path: Path, root: Path, tech: Tech) -> str:
    rel = path.relative_to(root)
    return rel.parts[0] if len(rel.parts) > 1 else tech.value


def scenarios_for_file(path: Path, root: Path, cfg: MutationConfig) -> list[Scenario]:
    tech = detect_tech(path)
    assert tech is not None
    source = path.read_text(encoding="utf-8")
    script = normalize_script(parse(source, tech))
    return generate_scenarios(script, cfg, path.relative_to(root).as_posix(), source)


def _run_file(args: tuple[str, str, MutationConfig, RepairConfig]) -> tuple[str, Optional[str], list[ScenarioRecord]]:
    path_s, root_s, mcfg, rcfg = args
    path, root = Path(path_s), Path(root_s)
    rel = path.relative_to(root).as_posix()
    tech = detect_tech(path)
    assert tech is not None
    try:
        scenarios = scenarios_for_file(path, root, mcfg)
    except GenerationSkip as exc:
        return rel, str(exc), []
    except (ParseError, InferenceError) as exc:
        return rel, f"{type(exc).__name__}: {exc}", []
    bench = benchmark_of(path, root, tech)
    records = []
    for sc in scenarios:
        out = run_scenario(sc, rcfg)
        records.append(ScenarioRecord(
            rel, bench, tech.value, sc.origin[0], [list(m) for m in sc.origin[1]], out.status,
            out.failure_class, out.solutions_found, out.cost, round(out.wall_time, 4), out.unsound,
            [e.describe() for e in out.solution.edits] if out.solution else [],
            solution_to_json(out.solution) if out.solution else None,
        ))
    return rel, None, records


def recheck(report: SuiteReport, corpus: os.PathLike | str, mcfg: MutationConfig) -> list[str]:
    """Post-pass: re-verify the stored solution of every Passed record."""
    root = Path(corpus)
    violations: list[str] = []
    by_file: dict[str, list[ScenarioRecord]] = {}
    for r in report.records:
        if r.status == "Passed":
            by_file.setdefault(r.script, []).append(r)
    for rel, recs in by_file.items():
        scenarios = scenarios_for_file(root / rel, root, mcfg)
        index = {(s.origin[0], tuple(tuple(m) for m in s.origin[1])): s for s in scenarios}
        script = normalize_script(parse(scenarios[0].source, scenarios[0].tech)) if scenarios else None
        for r in recs:
            sc = index.get((r.state_index, tuple(tuple(m) for m in r.mutations)))
            if sc is None or script is None or r.solution is None:
                violations.append(f"{rel}: passed record without a reproducible scenario or solution")
                continue
            sol = solution_from_json(r.solution)
            if not verify_solution(script, sol, sc.desired) or not check_closure(script, sol, sc.desired):
                violations.append(f"{rel}: state {r.state_index} mutations {r.mutations}")
    return violations


def run_suite(corpus: os.PathLike | str, mutation_cfg: Optional[MutationConfig] = None,
              repair_cfg: Optional[RepairConfig] = None, workers: int = 1,
              recheck_passed: bool = False) -> SuiteReport:
    """Run every scenario of every script under ``corpus``.

    One file is one task: all its scenarios run in the same worker. Results
    are merged in file order, so the report does not depend on ``workers``.
    """
    mcfg = mutation_cfg or MutationConfig()
    rcfg = repair_cfg or RepairConfig()
    root = Path(corpus)
    files = corpus_files(root)
    report = SuiteReport()
    if not files:
        return report
    jobs = [(str(p), str(root), mcfg, rcfg) for p in files]
    if workers <= 1:
        results = [_run_file(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_file, jobs))
    for rel, skip, records in results:
        if skip is not None:
            report.skipped[rel] = skip
            log.info("skipped %s: %s", rel, skip)
        report.records.extend(records)
    if recheck_passed:
        report.soundness_violations = recheck(report, root, mcfg)
    return report
