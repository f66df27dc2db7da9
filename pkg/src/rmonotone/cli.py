"""Command-line front end.

    rmonotone check --r 2 --orders 0,1,2 --norms 0.7,1,1
    rmonotone check problem.json --json
    rmonotone scan --r 2 --orders 0,1,2 --norms 0.5,1,1 --vary 0 --range 0.3:0.7:5
    rmonotone selftest --trials 200 --seed 3
    rmonotone eval --spline witness.json --order 1 --at -0.5,0
    rmonotone eval --spline witness.json --norms 0,1,2

Exit codes: 0 admissible (or success), 1 inadmissible (or a failed self
test), 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import documents as docs
from .admissibility import decide
from .errors import InvalidArgument, NumericalFailure, SolverError
from .oracle import comparison_suite
from .spline import AlternatingSpline, NormTargets, closed_form_norms, eval_derivative, measure_norms

EXIT_OK = 0
EXIT_INADMISSIBLE = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _int_list(text, name):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgument(f"{name} must be a comma-separated list of integers", field=name) from None


def _float_list(text, name):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgument(f"{name} must be a comma-separated list of numbers", field=name) from None


def _problem(args):
    if args.problem:
        doc = docs.ProblemDocument.from_dict(docs.load_file(args.problem, "problem"))
        r, orders, norms, config = doc.r, list(doc.orders), list(doc.norms), dict(doc.config)
    else:
        r, orders, norms, config = None, None, None, {}
    if args.r is not None:
        r = args.r
    if args.orders is not None:
        orders = _int_list(args.orders, "orders")
    if args.norms is not None:
        norms = _float_list(args.norms, "norms")
    for name, value in (("r", r), ("orders", orders), ("norms", norms)):
        if value is None:
            raise InvalidArgument(f"missing {name}: pass --{name} or a problem file", field=name)
    if args.tolerance is not None:
        config["equality_tolerance"] = args.tolerance
    return docs.ProblemDocument(r, tuple(orders), tuple(norms), config)


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidArgument("range must look like lo:hi:steps", field="range")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidArgument("range must look like lo:hi:steps", field="range") from None
    if steps < 2:
        raise InvalidArgument("range needs at least 2 steps", field="range")
    if not (lo > 0 and hi > lo):
        raise InvalidArgument("range needs 0 < lo < hi", field="range")
    return lo, hi, steps


def cmd_check(args, out):
    problem = _problem(args)
    verdict = decide(problem.spec(), problem.targets(), problem.decision_config())
    if args.json:
        out.write(docs.dumps(docs.verdict_to_dict(verdict)) + "\n")
    else:
        out.write(verdict.describe() + "\n")
    return EXIT_OK if verdict.admissible else EXIT_INADMISSIBLE


def cmd_scan(args, out):
    problem = _problem(args)
    if args.vary is None or args.range is None:
        raise InvalidArgument("scan needs --vary and --range", field="vary")
    if not 0 <= args.vary < len(problem.norms):
        raise InvalidArgument(f"--vary must index the norms (0..{len(problem.norms) - 1})", field="vary")
    lo, hi, steps = _parse_range(args.range)
    spec, config = problem.spec(), problem.decision_config()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["value", "admissible", "type", "margin"])
    status = EXIT_OK
    for value in np.linspace(lo, hi, steps):
        value = float(f"{value:.15g}")  # drop linspace round-off from the grid values
        norms = list(problem.norms)
        norms[args.vary] = float(value)
        try:
            v = decide(spec, NormTargets(tuple(norms)), config)
        except SolverError:
            writer.writerow([repr(float(value)), "error", "", ""])
            status = EXIT_NUMERICAL
            continue
        margin = v.margins[args.vary]
        writer.writerow([
            repr(float(value)),
            "true" if v.admissible else "false",
            v.spline_type.value if v.spline_type else "",
            repr(float(margin)) if np.isfinite(margin) else "",
        ])
    out.write(buf.getvalue())
    return status


def cmd_selftest(args, out):
    if args.trials < 1:
        raise InvalidArgument("trials must be positive", field="trials")
    report = comparison_suite(args.trials, seed=args.seed)
    if args.json:
        out.write(docs.dumps(docs.report_to_dict(report)) + "\n")
    else:
        out.write(
            f"{report.trials} trials, {report.admissible} admissible, "
            f"{report.failure_count} failures, {report.seconds:.1f} s\n"
        )
        for f in report.failures:
            out.write(f"  trial {f.trial} (seed {f.seed}): {f.reason}\n")
    return EXIT_OK if report.failure_count == 0 else EXIT_INADMISSIBLE


def cmd_eval(args, out):
    if args.spline is None:
        raise InvalidArgument("eval needs --spline FILE", field="spline")
    spline = docs.spline_from_dict(docs.load_file(args.spline, "spline"))
    if args.norms is not None:
        orders = list(range(spline.r + 1)) if args.norms == "all" else _int_list(args.norms, "norms")
        if isinstance(spline, AlternatingSpline):
            values = closed_form_norms(spline, orders)
        else:
            values = measure_norms(spline, orders)
        result = {"orders": orders, "norms": [float(v) for v in values]}
        lines = [f"order {k}: {v:.6g}" for k, v in zip(orders, values)]
    else:
        if args.order is None or args.at is None:
            raise InvalidArgument("eval needs --order and --at, or --norms", field="order")
        ts = _float_list(args.at, "at")
        values = eval_derivative(spline, args.order, np.array(ts))
        result = {"order": args.order, "t": ts, "values": [float(v) for v in np.atleast_1d(values)]}
        lines = [f"t={t:.6g}: {v:.6g}" for t, v in zip(ts, result["values"])]
    if args.json:
        out.write(docs.dumps(result) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmonotone",
        description="Admissible derivative norms of r-monotone functions on the negative half-line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_flags(p):
        p.add_argument("problem", nargs="?", help="problem JSON file {r, orders, norms, config}")
        p.add_argument("--r", type=int)
        p.add_argument("--orders", help="comma list of derivative orders")
        p.add_argument("--norms", help="comma list of norm targets")
        p.add_argument("--tolerance", type=float, help="relative equality tolerance")
        p.add_argument("--json", action="store_true", help="structured output")

    problem_flags(sub.add_parser("check", help="decide admissibility and print the verdict"))
    scan = sub.add_parser("scan", help="vary one target over a grid, CSV output")
    problem_flags(scan)
    scan.add_argument("--vary", type=int, help="index of the target to vary")
    scan.add_argument("--range", help="lo:hi:steps")

    st = sub.add_parser("selftest", help="random end-to-end comparison suite")
    st.add_argument("--trials", type=int, default=100)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--json", action="store_true")

    ev = sub.add_parser("eval", help="evaluate a stored spline")
    ev.add_argument("--spline", metavar="FILE")
    ev.add_argument("--order", type=int)
    ev.add_argument("--at", help="comma list of points t <= 0")
    ev.add_argument("--norms", nargs="?", const="all", help="comma list of orders (default all)")
    ev.add_argument("--json", action="store_true")
    return parser


COMMANDS = {"check": cmd_check, "scan": cmd_scan, "selftest": cmd_selftest, "eval": cmd_eval}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # "--at -0.5" would otherwise be read as an unknown option
    for i in range(len(argv) - 2, -1, -1):
        if argv[i] == "--at" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"--at={argv[i + 1]}"]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except InvalidArgument as exc:
        field = f" [{exc.field}]" if exc.field else ""
        err.write(f"invalid input{field}: {exc}\n")
        return EXIT_INVALID
    except (NumericalFailure, SolverError) as exc:
        err.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
