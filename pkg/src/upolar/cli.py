"""Command line entry point: ``upolar {tables,build,track,verify,simulate}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analysis
from .bounds import bound_table, check_g_monotone, design_delta
from .channels import make_bec, parse_channel
from .construction import attach_fast_stage, build_general, dump_plan, parse_plan
from .simulation import SimConfig, load_config, run_mc, write_result

SUITES = ("universality", "less_noisy", "bounds", "general_rate", "all")
TRACK_FIELDS = ("index", "label", "good", "capacity", "bhattacharyya", "entropy")
TABLE_FIELDS = ("n", "lower", "upper")


def _emit(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _rows_arg(text):
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_tables(args):
    table = bound_table(args.capacity, args.n)
    keep = set(args.rows) if args.rows else None
    rows = [(r.n, repr(r.lowerI), repr(r.upperI)) for r in table if keep is None or r.n in keep]
    _emit(_csv_text(TABLE_FIELDS, rows), args.output)
    return 0


def _plan_from_args(args):
    if getattr(args, "plan", None):
        return parse_plan(Path(args.plan).read_text())
    plan = build_general(args.b, args.g, args.n, args.K)
    spec = None
    if getattr(args, "m", None) is not None:
        delta = args.delta if args.delta is not None else design_delta(args.g / (args.b + args.g), args.n)
        spec = attach_fast_stage(plan, args.m, delta, args.margin)
    return plan, spec


def cmd_build(args):
    plan, spec = _plan_from_args(args)
    _emit(dump_plan(plan, spec), args.output)
    return 0


def cmd_track(args):
    plan, _ = _plan_from_args(args)
    w = parse_channel(args.channel)
    budget = None if args.budget == 0 else args.budget
    good = set(plan.good_indices)
    rows = []
    for i, (lab, m) in enumerate(zip(plan.labels, analysis.track_positions(plan, w, budget))):
        rows.append((i, str(lab), int(i in good), repr(m.capacity), repr(m.bhattacharyya), repr(m.entropy)))
    _emit(_csv_text(TRACK_FIELDS, rows), args.output)
    return 0


def _suite(name, args):
    if name == "universality":
        plan = build_general(args.b, args.g, args.n, args.K)
        cap = args.g / (args.b + args.g)
        return analysis.verify_universality(plan, analysis.default_channel_class(cap), args.budget)
    if name == "less_noisy":
        records = []
        for v, w in analysis.erasure_composed_pairs(args.pairs, args.seed):
            records.extend(analysis.verify_less_noisy_preservation(v, w)["records"])
        return analysis.make_report("less_noisy", records)
    if name == "bounds":
        records = []
        bsc = analysis.default_channel_class(0.5)[1]
        records.extend(analysis.bound_sandwich(bsc, args.bound_levels, args.budget)["records"])
        bec = make_bec(0.5)
        records.extend(analysis.bound_sandwich(bec, args.bound_levels, None)["records"])
        for k in range(1, 20):
            x = k / 20
            records.append(analysis.make_record("g_step nondecreasing in t", {"x": x}, check_g_monotone(x)))
        return analysis.make_report("bounds", records)
    if name == "general_rate":
        records = []
        for b, g in ((4, 2), (2, 4), (3, 3), (5, 1)):
            eps = 1.0 - g / (b + g) - 0.05
            rep = analysis.verify_general_rate_trends(b, g, make_bec(eps), args.levels)
            for r in rep["records"]:
                r["values"] = {"b": b, "g": g, **r["values"]}
            records.extend(rep["records"])
        return analysis.make_report("general_rate", records)
    raise ValueError(f"unknown suite {name!r}")


def cmd_verify(args):
    names = SUITES[:-1] if args.suite == "all" else (args.suite,)
    reports = [_suite(name, args) for name in names]
    out = reports[0] if len(reports) == 1 else {"suite": "all", "reports": reports,
                                                "pass": all(r["pass"] for r in reports)}
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.output)
    return 0 if out["pass"] else 1


def cmd_simulate(args):
    overrides = {k: getattr(args, k) for k in ("n", "K", "b", "g", "m", "delta", "channel", "trials", "seed",
                                               "output", "chunk", "precision")}
    if args.config:
        config = load_config(args.config, **overrides)
    else:
        config = SimConfig(**{k: v for k, v in overrides.items() if v is not None})
    result = run_mc(config, workers=args.workers)
    if not config.output:
        sys.stdout.write(json.dumps(result.to_dict(args.wall_time), indent=2, sort_keys=True) + "\n")
    elif args.wall_time:
        write_result(result, config.output, include_wall_time=True)
    return 0


def _shape_args(p, defaults=True):
    p.add_argument("--n", type=int, default=3 if defaults else None)
    p.add_argument("--K", type=int, default=4 if defaults else None)
    p.add_argument("--b", type=int, default=1 if defaults else None)
    p.add_argument("--g", type=int, default=1 if defaults else None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="upolar", description="Universal polar codes by slow polarization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="capacity bounds on the improved channel as CSV")
    p.add_argument("--capacity", type=float, default=0.5)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--rows", type=_rows_arg, default=None, help="comma-separated n values to keep")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("build", help="write a plan file (with fast stage when --m is given)")
    _shape_args(p)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("track", help="per-index channel metrics as CSV")
    _shape_args(p)
    p.add_argument("--plan", help="read the plan from a file instead of building it")
    p.add_argument("--channel", default="bsc:0.11")
    p.add_argument("--budget", type=int, default=512, help="output alphabet budget; 0 for exact")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("verify", help="run analysis suites; JSON report, exit 1 on failure")
    p.add_argument("--suite", choices=SUITES, default="all")
    _shape_args(p)
    p.add_argument("--budget", type=int, default=512)
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--bound-levels", type=int, default=8)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo block error rate; JSON result")
    p.add_argument("--config", help="key=value config file; flags override it")
    _shape_args(p, defaults=False)
    p.add_argument("--m", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--channel")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--chunk", type=int)
    p.add_argument("--precision", choices=("single", "double"))
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--wall-time", action="store_true", help="include wall_time in the result")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"upolar: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
