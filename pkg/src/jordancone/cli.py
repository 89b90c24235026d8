"""Command line entry point: ``jordancone <command> problem.json [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report as rp
from .errors import (
    ContinuationBreakdown,
    DegenerateThroughT,
    DimensionMismatch,
    InsufficientTruncation,
    JordanConeError,
    NewtonDivergence,
    NonPositive,
    OutOfCone,
    ShiftOrderViolation,
    SingularJacobian,
    Undefined,
    Unsupported,
)
from .problem import ProblemError, load_problem, read_problem

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NEGATIVE = 3

COMMANDS = ("analyze", "gate", "solve", "levelset", "degree", "milnor", "perturb", "verify")

# analysis-negative outcomes: a report is still written
NEGATIVE = (
    NewtonDivergence, SingularJacobian, ContinuationBreakdown, ShiftOrderViolation, OutOfCone,
    DegenerateThroughT, NonPositive, Undefined, Unsupported, InsufficientTruncation,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jordancone", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", nargs="?", help="problem file (for verify: a stored report)")
    p.add_argument("--shift", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--newton-tol", type=float)
    p.add_argument("--tau-rank", type=float)
    p.add_argument("--max-k", type=int)
    p.add_argument("--mode", choices=("auto", "exact", "float"))
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="levelset: write the samples here")
    p.add_argument("--ks", type=int, nargs="+", help="milnor: k value of each solution curve")
    p.add_argument("--ord", type=int, help="milnor: order of the map (default: from the file)")
    p.add_argument("--kind", choices=("map", "curve", "joint"), help="perturb: what to perturb")
    p.add_argument("--alpha", help="perturb: perturbation size")
    p.add_argument("--count", type=int, help="perturb: number of random experiments")
    p.add_argument("--seed", type=int, help="perturb: random seed")
    return p


def _overrides(args) -> dict:
    return {
        "shift": args.shift, "eta": args.eta, "newton_tol": args.newton_tol,
        "tau_rank": args.tau_rank, "max_k": args.max_k, "mode": args.mode,
        "grid_min": args.grid_min, "grid_max": args.grid_max, "grid_points": args.grid_points,
    }


def _emit(report: dict, out: str | None, stdout) -> None:
    text = rp.dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _error_report(command: str, exc: Exception, status: str) -> dict:
    return {"schema": rp.SCHEMA_TAG, "command": command, "status": status,
            "error": {"type": type(exc).__name__, "message": str(exc)}}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    cmd = args.command
    problem = None
    try:
        if cmd == "verify":
            if not args.file:
                raise ProblemError("verify needs a stored report")
            try:
                stored = json.loads(Path(args.file).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ProblemError(f"cannot read report: {exc}") from None
            if stored.get("schema") != rp.SCHEMA_TAG or "input" not in stored:
                raise ProblemError("not a report produced by this tool")
            report = rp.verify_report(stored, load_problem)
        elif cmd == "milnor" and not args.file:
            if args.ks is None or args.ord is None:
                raise ProblemError("milnor without a problem file needs --ks and --ord")
            report = rp.milnor_report(None, args.ks, args.ord)
        else:
            if not args.file:
                raise ProblemError(f"{cmd} needs a problem file")
            problem = read_problem(args.file, _overrides(args))
            if cmd == "perturb":
                settings = dict(problem.options.perturbation)
                for key in ("kind", "alpha", "count", "seed"):
                    val = getattr(args, key)
                    if val is not None:
                        settings[key] = val
                problem.options.perturbation = settings
            report = _dispatch(cmd, problem, args)
    except (ProblemError, DimensionMismatch) as exc:
        stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except NEGATIVE as exc:
        rep = _error_report(cmd, exc, "failed")
        if problem is not None:
            rep["input"] = rp.echo_input(problem)
        _emit(rep, args.out, stdout)
        stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_NEGATIVE
    except JordanConeError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:
        stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    _emit(report, args.out, stdout)
    return EXIT_OK if report.get("status") == "ok" else EXIT_NEGATIVE


def _dispatch(cmd: str, problem, args) -> dict:
    if cmd == "analyze":
        return rp.analyze_report(problem)
    if cmd == "gate":
        return rp.gate_report(problem)
    if cmd == "solve":
        return rp.solve_report(problem)
    if cmd == "levelset":
        a, frame, rows = rp.levelset_rows(problem)
        report = rp.levelset_report(problem, rows, a, frame)
        if frame is not None:
            text = rp.levelset_csv(problem, frame, rows)
            if args.csv:
                Path(args.csv).write_text(text, encoding="utf-8")
            else:
                report["csv"] = text
        return report
    if cmd == "degree":
        return rp.degree_report(problem)
    if cmd == "milnor":
        return rp.milnor_report(problem, args.ks, args.ord)
    if cmd == "perturb":
        return rp.perturb_report(problem)
    raise AssertionError(cmd)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
