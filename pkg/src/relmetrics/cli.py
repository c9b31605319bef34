"""Command-line front end: compute, verify, sharpness, ball, probe.

Exit codes: 0 success (probe suites always), 1 assertion violations,
2 usage errors (bad flags, unreadable files, points outside G, ...).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import metrics as M
from .contour import ball_contour, write_contour_csv
from .domains import SupremumStrategy, load_domain
from .extended_space import format_point, parse_point
from .harness.report import VerificationReport
from .harness.sharpness import CASES, sharpness_sweep
from .harness.suites import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _point_arg(text: str):
    try:
        return parse_point(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _exponent_arg(text: str) -> float:
    try:
        return M.parse_exponent(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _check_input(path: str):
    if not os.path.isfile(path):
        raise UsageError(f"cannot read file {path!r}")


def _check_output(path: str | None):
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent!r} does not exist")


def _emit_report(report: VerificationReport, args) -> int:
    if args.out:
        report.write(args.out)
    if args.json:
        print(report.to_json())
    else:
        print(report.summary())
        for note in report.notes:
            print(f"  note: {note}")
        for w in report.witnesses[:5]:
            print(f"  witness: {json.dumps(w, sort_keys=True)}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


# -- subcommands -------------------------------------------------------------------

def cmd_compute(args) -> int:
    _check_input(args.domain)
    g = load_domain(args.domain)
    strategy = SupremumStrategy(args.strategy) if args.strategy else None
    mv = M.compute(args.metric, g, args.x, args.y, args.p, args.b, strategy)
    if args.json:
        print(json.dumps(mv.to_dict(), sort_keys=True))
    else:
        print(f"{mv.metric} = {mv.value!r}")
        if mv.witnesses:
            print("witnesses: " + "; ".join(format_point(w) for w in mv.witnesses))
        print(f"exactness: {mv.exactness}")
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_output(args.out)
    kwargs = {"dim": args.dim, "samples": args.samples, "seed": args.seed}
    if args.p or args.q:
        if len(args.p or []) != len(args.q or []):
            raise UsageError("--p and --q must be given the same number of times")
        kwargs["exponent_pairs"] = tuple(zip(args.p, args.q))
    return _emit_report(run_suite(args.suite, **kwargs), args)


def cmd_sharpness(args) -> int:
    _check_output(args.out)
    report = sharpness_sweep(args.case, args.resolution, args.dim, args.p, args.q, args.stop)
    return _emit_report(report, args)


def cmd_probe(args) -> int:
    _check_output(args.out)
    suite = {"bound": "bound-probe", "small-p": "small-p-probe"}[args.kind]
    kwargs = {"dim": args.dim, "samples": args.samples, "seed": args.seed}
    if args.kind == "small-p" and args.p:
        kwargs["probe_exponents"] = tuple(args.p)
    report = run_suite(suite, **kwargs)
    _emit_report(report, args)
    return EXIT_OK


def cmd_ball(args) -> int:
    _check_input(args.domain)
    _check_output(args.out)
    g = load_domain(args.domain)
    rows = ball_contour(args.metric, g, args.center, args.radius_value, args.resolution, args.p, args.b)
    if args.out:
        write_contour_csv(rows, args.out)
    else:
        print("theta,x1,x2")
        for r in rows:
            print(f"{r.theta!r},{r.x1!r},{r.x2!r}")
    unbounded = sum(not r.bounded for r in rows)
    if unbounded:
        print(f"{unbounded} of {len(rows)} rays left G before reaching the level", file=sys.stderr)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relmetrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate one metric at a pair of points")
    p.add_argument("--metric", required=True, choices=M.METRIC_IDS)
    p.add_argument("--domain", required=True, help="domain spec file (JSON)")
    p.add_argument("--x", required=True, type=_point_arg, help='point, e.g. "0.5,0" or "inf"')
    p.add_argument("--y", required=True, type=_point_arg)
    p.add_argument("--p", type=_exponent_arg, default=None, help="exponent (real > 0 or inf)")
    p.add_argument("--b", type=_point_arg, default=None, help="fixed boundary point for j_pointed")
    p.add_argument("--strategy", choices=("exhaustive", "grid_refine"), default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=_exponent_arg, action="append", help="repeatable; pairs with --q")
    p.add_argument("--q", type=_exponent_arg, action="append")
    p.add_argument("--out", default=None, help="write the report JSON here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sharpness", help="run a sharpness sweep")
    p.add_argument("--case", required=True, choices=sorted(CASES))
    p.add_argument("--resolution", type=int, default=4, help="trace points per decade")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=_exponent_arg, default=math.inf)
    p.add_argument("--q", type=_exponent_arg, default=1.0)
    p.add_argument("--stop", type=float, default=None, help="final sweep parameter")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("ball", help="export a planar metric-ball contour as CSV")
    p.add_argument("--metric", required=True, choices=M.METRIC_IDS)
    p.add_argument("--domain", required=True)
    p.add_argument("--center", required=True, type=_point_arg)
    p.add_argument("--radius-value", required=True, type=float)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--p", type=_exponent_arg, default=None)
    p.add_argument("--b", type=_point_arg, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("probe", help="run a report-only probe (always exits 0)")
    p.add_argument("--kind", choices=("bound", "small-p"), default="bound")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=_exponent_arg, action="append")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_probe)
    return parser


_VALUE_FLAGS = ("--x", "--y", "--b", "--center", "--radius-value", "--p", "--q", "--stop")


def _attach_values(argv: list[str]) -> list[str]:
    """Let point literals start with a minus sign: ``--y -1,0`` becomes ``--y=-1,0``."""
    out, k = [], 0
    while k < len(argv):
        tok = argv[k]
        if tok in _VALUE_FLAGS and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError, OSError, json.JSONDecodeError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"relmetrics {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
