"""Command-line entry point: ``iacrepair infer | repair | scenarios``.

Exit codes:

====  =====================================================
0     success
1     no solution / empty corpus / pass rate below --min-pass
2     unreadable input, bad state file, or script parse error
3     branch combinations exceed the cap
4     timeout with no solution
5     engine error (including unevaluable resource identifiers)
====  =====================================================
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import __version__
from .frontends import ParseError, detect_tech, parse
from .infer import CapacityError, InferenceError, infer_from_trace, infer_states
from .ir import IRScript, Tech
from .normalize import DbError, normalize_script
from .patcher import PatchError, patch_source, unified_diff
from .repair import EngineError, RepairConfig, RepairTimeout, classify_failure, repair
from .scenarios import (
    GenerationSkip,
    MutationConfig,
    corpus_files,
    run_suite,
    scenarios_for_file,
)
from .state import StateFormatError, parse_state

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INPUT = 2
EXIT_BRANCH_CAP = 3
EXIT_TIMEOUT = 4
EXIT_ENGINE = 5

log = logging.getLogger("iacrepair")


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None


def _write(dest: str, text: str, stdout: TextIO) -> None:
    if dest == "-":
        stdout.write(text)
        return
    Path(dest).parent.mkdir(parents=True, exist_ok=True)
    Path(dest).write_text(text, encoding="utf-8")


def _tech(explicit: Optional[str], script: str) -> Tech:
    if explicit:
        return Tech(explicit)
    tech = detect_tech(script)
    if tech is None:
        raise _Fail(EXIT_INPUT, f"cannot tell the technology of {script}; pass --tech")
    return tech


def _load_script(path: str, tech: Tech) -> IRScript:
    source = _read(path)
    try:
        return normalize_script(parse(source, tech))
    except ParseError as exc:
        raise _Fail(EXIT_INPUT, f"{path}:{exc.line}:{exc.column}: {exc.message}") from None


def cmd_infer(args: argparse.Namespace, stdout: TextIO) -> int:
    if args.trace:
        try:
            state = infer_from_trace(_read(args.trace), args.fs_root, content_hash=args.content_hash)
        except OSError as exc:
            raise _Fail(EXIT_INPUT, f"cannot probe {args.fs_root}: {exc}") from None
        _write(args.out, state.dumps() + "\n", stdout)
        return EXIT_OK
    if not args.script:
        raise _Fail(EXIT_INPUT, "infer needs --script or --trace")
    script = _load_script(args.script, _tech(args.tech, args.script))
    try:
        states = infer_states(script, args.branch_cap)
    except CapacityError as exc:
        raise _Fail(EXIT_BRANCH_CAP, str(exc)) from None
    except InferenceError as exc:
        raise _Fail(EXIT_ENGINE, str(exc)) from None
    if len(states) == 1:
        payload = states[0][0].to_json()
    else:
        payload = [{"branches": [list(d) for d in decisions], "state": st.to_json()} for st, decisions in states]
    _write(args.out, json.dumps(payload, indent=2, ensure_ascii=False) + "\n", stdout)
    return EXIT_OK


def cmd_repair(args: argparse.Namespace, stdout: TextIO) -> int:
    tech = _tech(args.tech, args.script)
    script = _load_script(args.script, tech)
    try:
        desired = parse_state(_read(args.state))
    except StateFormatError as exc:
        raise _Fail(EXIT_INPUT, f"{args.state}: {exc}") from None
    cfg = RepairConfig(
        max_solutions=args.max_solutions, timeout_seconds=args.timeout, max_cost=args.max_cost,
        allow_resource_insertion=not args.no_insert, branch_cap=args.branch_cap,
    )
    timed_out = False
    try:
        solutions = repair(script, desired, cfg)
    except RepairTimeout as exc:
        solutions, timed_out = exc.solutions, True
    except CapacityError as exc:
        raise _Fail(EXIT_BRANCH_CAP, str(exc)) from None
    except (InferenceError, EngineError) as exc:
        raise _Fail(EXIT_ENGINE, str(exc)) from None
    if not solutions:
        if timed_out:
            raise _Fail(EXIT_TIMEOUT, f"timed out after {args.timeout}s without a solution")
        reason = classify_failure(script, desired, cfg)
        raise _Fail(EXIT_NO_SOLUTION, f"no repair found ({reason})")
    out_dir = Path(args.out) if args.out else Path(args.script).parent
    name = Path(args.script).name
    for i, sol in enumerate(solutions, 1):
        try:
            text = patch_source(script, sol)
        except PatchError as exc:
            raise _Fail(EXIT_ENGINE, f"solution {i}: {exc}") from None
        target = out_dir / f"{name}.fix{i}"
        _write(str(target), text, stdout)
        stdout.write(f"solution {i}: cost {sol.total_cost} -> {target}\n")
        for edit in sol.edits:
            stdout.write(f"  {edit.describe()}\n")
        if args.diff:
            diff = unified_diff(script.source, text, name)
            _write(str(target) + ".diff", diff, stdout)
            stdout.write(diff)
    if timed_out:
        log.warning("timed out; %d solution(s) found before the deadline", len(solutions))
    return EXIT_OK


def _mutation_cfg(args: argparse.Namespace) -> MutationConfig:
    return MutationConfig(
        mutations_min=args.min_mutations, mutations_max=args.max_mutations,
        scenarios_per_state=args.per_state, seed=args.seed,
    )


def cmd_scenarios(args: argparse.Namespace, stdout: TextIO) -> int:
    root = Path(args.corpus)
    files = corpus_files(root)
    if not files:
        raise _Fail(EXIT_NO_SOLUTION, f"no scripts under {root}")
    mcfg = _mutation_cfg(args)
    if args.action == "gen":
        out = Path(args.out)
        total = 0
        for path in files:
            rel = path.relative_to(root).as_posix()
            try:
                scenarios = scenarios_for_file(path, root, mcfg)
            except (GenerationSkip, ParseError, InferenceError) as exc:
                log.info("skipped %s: %s", rel, exc)
                continue
            payload = [s.to_json() for s in scenarios]
            _write(str(out / (rel + ".scenarios.json")), json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                   stdout)
            total += len(scenarios)
        stdout.write(f"{total} scenarios from {len(files)} scripts written to {out}\n")
        return EXIT_OK
    rcfg = RepairConfig(timeout_seconds=args.timeout, allow_resource_insertion=not args.no_insert)
    report = run_suite(root, mcfg, rcfg, workers=args.workers, recheck_passed=args.recheck)
    if args.report:
        _write(args.report, json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n", stdout)
    stdout.write(report.table() + "\n")
    if report.soundness_violations:
        log.error("%d passed records failed re-verification", len(report.soundness_violations))
        return EXIT_ENGINE
    if not report.records or report.pass_rate < args.min_pass:
        return EXIT_NO_SOLUTION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iacrepair", description="Repair IaC scripts against a desired system state.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    techs = [t.value for t in Tech]

    inf = sub.add_parser("infer", help="infer system state(s) from a script or a syscall trace")
    inf.add_argument("--tech", choices=techs)
    inf.add_argument("--script")
    inf.add_argument("--trace")
    inf.add_argument("--fs-root", default="/")
    inf.add_argument("--content-hash", action="store_true", help="record a sha256 of file contents")
    inf.add_argument("--branch-cap", type=int, default=64)
    inf.add_argument("--out", default="-")
    inf.set_defaults(func=cmd_infer)

    rep = sub.add_parser("repair", help="repair a script so it reaches a desired state")
    rep.add_argument("--tech", choices=techs)
    rep.add_argument("--script", required=True)
    rep.add_argument("--state", required=True)
    rep.add_argument("--max-solutions", type=int, default=10)
    rep.add_argument("--timeout", type=float, default=120.0)
    rep.add_argument("--max-cost", type=int, default=8)
    rep.add_argument("--branch-cap", type=int, default=64)
    rep.add_argument("--diff", action="store_true")
    rep.add_argument("--out", help="directory for patched scripts (default: next to the script)")
    rep.add_argument("--no-insert", action="store_true", help="never insert new resources")
    rep.set_defaults(func=cmd_repair)

    sc = sub.add_parser("scenarios", help="generate or run mutation-based repair scenarios")
    sc.add_argument("action", choices=("gen", "run"))
    sc.add_argument("--corpus", required=True)
    sc.add_argument("--seed", type=int, default=42)
    sc.add_argument("--per-state", type=int, default=25)
    sc.add_argument("--min-mutations", type=int, default=1)
    sc.add_argument("--max-mutations", type=int, default=3)
    sc.add_argument("--workers", type=int, default=1)
    sc.add_argument("--timeout", type=float, default=120.0)
    sc.add_argument("--no-insert", action="store_true")
    sc.add_argument("--recheck", action="store_true", help="re-verify every passed record afterwards")
    sc.add_argument("--min-pass", type=float, default=0.0, help="exit 1 below this Passed fraction")
    sc.add_argument("--out", default="scenarios", help="output directory for 'gen'")
    sc.add_argument("--report", help="JSON report path for 'run'")
    sc.set_defaults(func=cmd_scenarios)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="iacrepair: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, stdout or sys.stdout)
    except _Fail as exc:
        print(f"iacrepair: {exc}", file=sys.stderr)
        return exc.code
    except (DbError, ValueError) as exc:
        print(f"iacrepair: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
