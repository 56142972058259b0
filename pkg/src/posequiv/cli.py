"""Command line: ``posequiv run|check|replay``.

Exit codes: 0 every check Holds, 2 some check Violated, 3 only
Inconclusive left, 1 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .criteria import Trace
from .scenario import (EXIT_INPUT, EXIT_VIOLATED, ScenarioError, dumps, evaluate, exit_code,
                       load_scenario, make_text, parse_trace, run, trace_lines, verdict_row)
from .criteria import convergence_probe, run_trace
from .verdict import Verdict


def _overrides(args) -> dict:
    return {k: getattr(args, k) for k in ("horizon", "bound", "quiet", "budget", "seed")}


def cmd_run(args, out) -> int:
    scn = load_scenario(args.scenario, _overrides(args))
    outcomes = run(scn)
    if args.out:
        target = Path(args.out)
        target.mkdir(parents=True, exist_ok=True)
        for o in outcomes:
            body = "".join(line + "\n" for line in trace_lines(o.trace))
            (target / f"{o.key}.ndjson").write_text(body, encoding="utf-8")
    else:
        for o in outcomes:
            out.write(dumps({"trace": o.key}) + "\n")
            for line in trace_lines(o.trace):
                out.write(line + "\n")
    return _table(outcomes, out)


def cmd_check(args, out) -> int:
    return _table(run(load_scenario(args.scenario, _overrides(args))), out)


def _table(outcomes, out) -> int:
    all_verdicts = []
    for o in outcomes:
        for kind, v in o.verdicts:
            out.write(verdict_row(o.key, kind, v) + "\n")
            all_verdicts.append(v)
    code = exit_code(all_verdicts)
    out.write(dumps({"summary": {"checks": len(all_verdicts), "exit": code}}) + "\n")
    return code


def cmd_replay(args, out) -> int:
    """Recompute the named combination and re-verify its checks on the recorded hypotheses."""
    scn = load_scenario(args.scenario, _overrides(args))
    path = Path(args.trace)
    try:
        recorded = parse_trace(path.read_text(encoding="utf-8").splitlines())
    except (OSError, ValueError) as exc:
        raise ScenarioError("trace", str(exc)) from exc
    key = args.combination or path.stem
    combo = next((c for c in scn.combinations() if c[0] == key), None)
    if combo is None:
        raise ScenarioError("trace", f"no combination named {key!r} in the scenario")
    _key, learner, _tname, target, tcfg = combo
    fresh = run_trace(learner, make_text(tcfg, target, scn.params["seed"]), max(1, len(recorded) - 1))
    verdicts = []
    if [r.as_dict() for r in fresh.records] != [r.as_dict() for r in recorded]:
        first = next((i for i, (a, b) in enumerate(zip(fresh.records, recorded)) if a != b),
                     min(len(fresh.records), len(recorded)))
        v = Verdict.violated(reason="recorded trace differs from recomputation", step=first)
        out.write(verdict_row(key, "replay", v) + "\n")
        verdicts.append(v)
    replayed = Trace(recorded, tuple(r.datum for r in recorded[1:]), learner.space)
    for check in scn.checks:
        if check["kind"] == "Confidence":
            v = convergence_probe(learner, [make_text(tcfg, target, scn.params["seed"])],
                                  len(recorded) - 1, scn.params["quiet"])
        else:
            v = evaluate(scn, replayed, target, None, check)
        out.write(verdict_row(key, check["kind"], v) + "\n")
        verdicts.append(v)
    code = exit_code(verdicts)
    out.write(dumps({"summary": {"checks": len(verdicts), "exit": code}}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posequiv", description="Run learning scenarios over positive equivalence relations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--horizon", type=int)
        p.add_argument("--bound", type=int)
        p.add_argument("--quiet", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--seed", type=int)

    p_run = sub.add_parser("run", help="emit traces and the verdict table")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", help="directory for one trace file per combination")
    common(p_run)
    p_check = sub.add_parser("check", help="verdict table only")
    p_check.add_argument("scenario")
    common(p_check)
    p_replay = sub.add_parser("replay", help="re-verify a recorded trace")
    p_replay.add_argument("trace")
    p_replay.add_argument("scenario")
    p_replay.add_argument("--combination", help="combination key (defaults to the trace file stem)")
    common(p_replay)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    for key, value in _overrides(args).items():
        if value is not None and value < (0 if key == "seed" else 1):
            print(f"error: --{key} must be positive", file=sys.stderr)
            return EXIT_INPUT
    handler = {"run": cmd_run, "check": cmd_check, "replay": cmd_replay}[args.command]
    try:
        return handler(args, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
