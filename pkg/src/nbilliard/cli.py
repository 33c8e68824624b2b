"""Command line entry point: ``nbilliard {angles,simulate,grid,verify-all}``.

Output is JSON (CSV for ``grid``) on stdout, or in ``--output``.  When
``--output`` is not given and ``NBILLIARD_OUTPUT_DIR`` is set, results are
written to ``$NBILLIARD_OUTPUT_DIR/<command>.json`` (``grid.csv``).

Exit codes: 0 pass, 1 verification failed, 2 usage error, 3 only degenerate
trajectories, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import mass_ratio_grid, three_body_bound
from .collisions import BilliardSystem, PairIndex, appendix_decomposition, verify_angle_theorem
from .jacobi import JacobiMasses
from .sim import max_collision_search, reduced_arrangement
from .verify import SUITES, run_suites

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3, 4
OUTPUT_ENV = "NBILLIARD_OUTPUT_DIR"


class UsageError(Exception):
    pass


def angle_tag(x: float, tol: float = 1e-9) -> str | None:
    """``"pi/3"``-style tag when ``x`` is within ``tol`` of ``pi p/q`` with ``q <= 6``."""
    for q in range(1, 7):
        p = round(x * q / math.pi)
        if abs(x - p * math.pi / q) <= tol:
            f = Fraction(p, q)
            if f == 0:
                return "0"
            num = "pi" if f.numerator == 1 else f"{f.numerator}pi"
            return num if f.denominator == 1 else f"{num}/{f.denominator}"
    return None


def tagged(angles) -> dict:
    values = [float(a) for a in angles]
    return {"radians": values, "tags": [angle_tag(a) for a in values]}


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, (np.floating,)):
        return _round(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_round(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(x) for x in obj]
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_round(payload), sort_keys=True, indent=2) + "\n"


def _floats(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc
    if not values:
        raise UsageError("empty number list")
    return values


def _target(args, default_name: str) -> Path | None:
    if args.output:
        return Path(args.output)
    root = os.environ.get(OUTPUT_ENV)
    return Path(root) / default_name if root else None


def _emit(text: str, target: Path | None) -> None:
    if target is None:
        sys.stdout.write(text)
        return
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True)
    target.write_text(text)


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    # deterministic commands still say so explicitly
    cfg.setdefault("seed", None)
    return cfg


# -- commands ------------------------------------------------------------------

def cmd_angles(args) -> int:
    masses = _floats(args.masses)
    labels = [p for p in args.pairs.split(",") if p]
    if len(labels) != 2:
        raise UsageError("--pairs takes exactly two pair labels, e.g. 12,23")
    try:
        sys_ = BilliardSystem(args.n, args.m, masses)
        a, b = PairIndex.parse(labels[0]), PairIndex.parse(labels[1])
        rep = verify_angle_theorem(sys_, a, b, formula=args.formula)
        dec = appendix_decomposition(sys_, a, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    passed = rep.passed and dec.spans_match
    payload = {
        "command": "angles",
        "config": _config(args),
        "case": rep.case,
        "expected": tagged(rep.expected),
        "computed": tagged(rep.computed),
        "discrepancies": [abs(x - y) for x, y in zip(rep.expected, rep.computed)],
        "max_discrepancy": rep.max_discrepancy,
        "zero_count": rep.zero_count,
        "expected_zero_count": rep.expected_zero_count,
        "decomposition": dec.to_dict(),
        "pass": passed,
    }
    _emit(dumps(payload), _target(args, "angles.json"))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_simulate(args) -> int:
    masses = _floats(args.masses)
    if len(masses) != 3:
        raise UsageError("--masses takes three values")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    try:
        jm = JacobiMasses(*masses)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = max_collision_search(
        reduced_arrangement(jm), args.trials, args.seed,
        max_events=args.max_events, sampler=args.sampler, workers=args.workers,
    )
    bound = three_body_bound(masses, "paper")
    exact = three_body_bound(masses, "exact")
    payload = {
        "command": "simulate",
        "config": _config(args),
        **res.to_dict(),
        "three_mass_bound": bound,
        "exact_angle_bound": exact,
    }
    if res.max_count is None:
        payload["pass"] = False
        payload["diagnostic"] = "every trajectory ended in a multiple collision"
        _emit(dumps(payload), _target(args, "simulate.json"))
        return EXIT_DEGENERATE
    payload["pass"] = res.max_count <= bound
    _emit(dumps(payload), _target(args, "simulate.json"))
    return EXIT_PASS if payload["pass"] else EXIT_FAIL


def cmd_grid(args) -> int:
    if not args.step > 0:
        raise UsageError("--step must be positive")
    grid = mass_ratio_grid(args.alpha_hi, args.beta_hi, args.step, workers=args.workers)
    target = _target(args, "grid.csv")
    meta = dumps({"command": "grid", "config": _config(args), "rows": int(grid.cells.size),
                  "flagged": int(grid.flags.sum())})
    _emit(grid.to_csv(), target)
    if target is None:
        sys.stderr.write(meta)
    else:
        target.with_name(target.name + ".meta.json").write_text(meta)
    return EXIT_PASS


def cmd_verify_all(args) -> int:
    only = [s for chunk in (args.only or []) for s in chunk.split(",") if s]
    unknown = [s for s in only if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")

    def progress(check):
        sys.stderr.write(f"{check.line()}  ({check.seconds:.1f}s)\n")
        sys.stderr.flush()

    checks = run_suites(only or None, seed=args.seed, trials=args.trials, progress=progress)
    passed = all(c.passed for c in checks)
    payload = {
        "command": "verify-all",
        "config": _config(args),
        "checks": [c.to_dict() for c in checks],
        "summary": {"total": len(checks), "passed": sum(c.passed for c in checks),
                    "failed": [f"{c.suite}.{c.name}" for c in checks if not c.passed]},
        "pass": passed,
    }
    _emit(dumps(payload), _target(args, "verify-all.json"))
    return EXIT_PASS if passed else EXIT_FAIL


# -- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nbilliard", description="Collision subspaces, principal angles and billiard collision bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("angles", help="principal angles between two collision subspaces")
    p.add_argument("--n", type=int, required=True, help="number of particles")
    p.add_argument("--m", type=int, required=True, help="spatial dimension")
    p.add_argument("--masses", required=True, help="comma separated, e.g. 1,1,1")
    p.add_argument("--pairs", required=True, help="two pair labels, e.g. 12,23")
    p.add_argument("--formula", choices=["paper", "exact"], default="paper",
                   help="closed form to compare against (default: the published one)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("simulate", help="collision counts in the reduced three-body arrangement")
    p.add_argument("--masses", required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", choices=["collinear", "sphere"], default="collinear")
    p.add_argument("--max-events", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("grid", help="three-mass bound over a grid of mass ratios (CSV)")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--alpha-hi", type=float, default=10.0)
    p.add_argument("--beta-hi", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("verify-all", help="run the invariant suites")
    p.add_argument("--only", action="append", help=f"suite(s) to run: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None, help="override every Monte-Carlo trial count")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"nbilliard: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"nbilliard: cannot write output: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
