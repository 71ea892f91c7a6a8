"""Command-line front end.

Subcommands: solve, levelset-dump, bench, grad-check, oracle. Exit codes:
0 success, 1 expectation/check failure, 2 usage error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .bench import (
    benchmark_cases,
    check_rows,
    format_table,
    grid_oracle,
    run_benchmark,
    summary_row,
    SUMMARY_HEADER,
    trace_rows,
    write_reports,
)
from .core import (
    BoxDomain,
    GradientMethod,
    NumericDomainError,
    UsageError,
    get_objective,
    gradient_check,
    interior_samples,
    objective_names,
)
from .descent import DescentParams, LineSearchParams, descend
from .levelset import FILTER_MODES, LevelSetConfig, level_candidates
from .solver import SgdConfig, solve

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
OUT_DIR_ENV = "SEQDESCENT_OUT_DIR"
DEFAULT_OUT_DIR = "seqdescent-out"

# key -> (type, default); flags and config-file keys share these names
SETTINGS = {
    "objective": (str, None),
    "start": (str, None),
    "box": (str, None),
    "seed": (int, 0),
    "grid_resolution": (int, 200),
    "filter_mode": (str, "descent"),
    "max_outer": (int, 50),
    "out_dir": (str, None),
    "format": (str, "csv"),
    "stationary_tol": (float, 1e-4),
    "level_offset": (float, 0.0),
    "empty_refinements": (int, 2),
    "grad_tol": (float, 1e-6),
    "f_tol": (float, 1e-10),
    "max_iters": (int, 10000),
    "line_search": (str, "armijo"),
    "gradient_mode": (str, "analytic"),
}

log = logging.getLogger("seqdescent")


class Usage(Exception):
    pass


def parse_floats(text, what):
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise Usage(f"{what} must be a comma-separated list of numbers, got {text!r}") from None


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise Usage(f"cannot read config file {path}: {err}") from None
    if not isinstance(data, dict):
        raise Usage("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(SETTINGS))
    if unknown:
        raise Usage(f"unknown config keys: {', '.join(unknown)}")
    return data


def settings(args):
    """Merge flags over config file over defaults."""
    conf = load_config(getattr(args, "config", None))
    out = {}
    for key, (typ, default) in SETTINGS.items():
        value = getattr(args, key, None)
        if value is None:
            value = conf.get(key, default)
        if value is not None and typ is not str:
            try:
                value = typ(value)
            except (TypeError, ValueError):
                raise Usage(f"{key} must be {typ.__name__}, got {value!r}") from None
        out[key] = value
    if out["out_dir"] is None:
        out["out_dir"] = os.environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR)
    if out["format"] not in ("csv", "jsonl"):
        raise Usage("format must be csv or jsonl")
    if out["filter_mode"] not in FILTER_MODES:
        raise Usage(f"filter-mode must be one of {', '.join(FILTER_MODES)}")
    return out


def resolve_objective(s):
    if not s["objective"]:
        raise Usage("--objective is required")
    try:
        obj = get_objective(s["objective"])
    except UsageError as err:
        raise Usage(str(err)) from None
    if s["box"]:
        vals = parse_floats(s["box"], "--box")
        if len(vals) != 2 * obj.dimension:
            raise Usage(f"--box needs {2 * obj.dimension} numbers (lo1,hi1,lo2,hi2,...)")
        try:
            obj = obj.with_domain(BoxDomain(vals[0::2], vals[1::2]))
        except UsageError as err:
            raise Usage(str(err)) from None
    return obj


def parse_start(s, obj):
    if s["start"] is None:
        return None
    x = parse_floats(s["start"], "--start")
    if len(x) != obj.dimension:
        raise Usage(f"--start needs {obj.dimension} coordinates")
    return np.array(x)


def sgd_config(s):
    try:
        descent = DescentParams(grad_tol=s["grad_tol"], f_tol=s["f_tol"], max_iters=s["max_iters"],
                                line_search=LineSearchParams(mode=s["line_search"]),
                                gradient=GradientMethod(mode=s["gradient_mode"]))
        lcfg = LevelSetConfig(grid_resolution=s["grid_resolution"], filter_mode=s["filter_mode"],
                              stationary_tol=s["stationary_tol"], level_offset=s["level_offset"])
        return SgdConfig(descent=descent, levelset=lcfg, max_outer=s["max_outer"], seed=s["seed"],
                         empty_refinements=s["empty_refinements"])
    except UsageError as err:
        raise Usage(str(err)) from None


def write_rows(path: Path, rows, fmt):
    """Write a header + rows table as CSV or as one JSON object per line."""
    path = path.with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        header = rows[0]
        with open(path, "w") as fh:
            for row in rows[1:]:
                fh.write(json.dumps(dict(zip(header, map(_json_cell, row)))) + "\n")
    return path


def _json_cell(cell):
    if cell == "":
        return None
    try:
        return json.loads(cell)
    except ValueError:
        return cell


def iterate_rows(report):
    p = len(report.best.x)
    rows = [["search", "iter", "f", "grad_norm", "lambda"] + [f"x{i + 1}" for i in range(p)]]
    for k, m in enumerate(report.minima):
        for j, it in enumerate(m.trace.iterates):
            rows.append([str(k), str(j), repr(it.f), repr(it.grad_norm), repr(it.lam)]
                        + [repr(float(v)) for v in it.x])
    return rows


def cmd_solve(args):
    s = settings(args)
    obj = resolve_objective(s)
    x0 = parse_start(s, obj)
    cfg = sgd_config(s)
    report = solve(obj, cfg, x0=x0)
    out = Path(s["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stem = f"solve_{obj.name}"
    (out / f"{stem}.json").write_text(report.to_json(indent=2) + "\n")
    write_rows(out / f"{stem}_trace", trace_rows(report), s["format"])
    write_rows(out / f"{stem}_iterates", iterate_rows(report), s["format"])
    print(f"objective {obj.name}  box {obj.domain}  kernels {_kernels.BACKEND}")
    for k, m in enumerate(report.minima):
        print(f"  k={k}  f={m.f!r}  x={m.x.tolist()}  ({m.trace.termination}, {m.trace.steps} steps)")
    print(f"termination {report.termination}; local searches {report.local_search_count}; "
          f"f-calls {report.f_calls}, grad-calls {report.grad_calls}")
    print(f"wrote {out / stem}.json")
    return EXIT_OK


def cmd_levelset_dump(args):
    s = settings(args)
    obj = resolve_objective(s)
    cfg = sgd_config(s)
    if args.level is not None:
        level = args.level
    elif args.at_minimum_of is not None:
        x = parse_floats(args.at_minimum_of, "--at-minimum-of")
        if len(x) != obj.dimension:
            raise Usage(f"--at-minimum-of needs {obj.dimension} coordinates")
        level = descend(obj, x, cfg.descent).f
    else:
        raise Usage("give --level or --at-minimum-of")
    cands = level_candidates(obj, level, obj.domain, cfg.levelset, cfg.descent.gradient)
    p = obj.dimension
    rows = [[f"x{i + 1}" for i in range(p)] + ["f"] + [f"g{i + 1}" for i in range(p)] + ["grad_norm"]]
    for c in cands:
        rows.append([repr(float(v)) for v in c.x] + [repr(c.f)] + [repr(float(v)) for v in c.grad]
                    + [repr(c.grad_norm)])
    path = write_rows(Path(s["out_dir"]) / f"levelset_{obj.name}", rows, s["format"])
    stationary = int(np.sum(cands.grad_norm <= cfg.levelset.stationary_tol))
    print(f"level {level!r}: {len(cands)} points ({stationary} stationary) -> {path}")
    return EXIT_OK


def cmd_bench(args):
    s = settings(args)
    cases = benchmark_cases()
    if args.case:
        wanted = [c for arg in args.case for c in arg.split(",") if c]
        known = {c.name for c in cases}
        missing = [w for w in wanted if w not in known]
        if missing:
            raise Usage(f"unknown case(s): {', '.join(missing)}; choose from {', '.join(sorted(known))}")
        cases = [c for c in cases if c.name in wanted]
    cfg = sgd_config(s)
    reports = []
    for case in sorted(cases, key=lambda c: c.name):
        reports.append(run_benchmark(case, cfg))
    write_reports(reports, s["out_dir"])
    print(format_table([SUMMARY_HEADER] + [summary_row(r) for r in reports]))
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(f"[{r.case}] kernels {_kernels.BACKEND}")
        for note in r.notes:
            print(f"  note: {note}")
        rows = check_rows(r)
        print(format_table([["status"] + rows[0][:6]] + [[_status(row)] + row[:6] for row in rows[1:]]))
    print("all expectations met" if not failed else f"FAILED: {', '.join(r.case for r in failed)}")
    return EXIT_OK if not failed else EXIT_FAIL


def _status(row):
    ok, checked = row[5] == "true", row[6] == "true"
    if not checked:
        return "info"
    return "pass" if ok else "FAIL"


def cmd_grad_check(args):
    s = settings(args)
    obj = resolve_objective(s)
    if args.points:
        pts = [parse_floats(p, "--points") for p in args.points.split(";") if p.strip()]
        if any(len(p) != obj.dimension for p in pts):
            raise Usage(f"each point needs {obj.dimension} coordinates")
    else:
        pts = interior_samples(obj.domain, args.samples, s["seed"])
    try:
        report = gradient_check(obj, pts, args.rel_tol)
    except UsageError as err:
        raise Usage(str(err)) from None
    verdict = "pass" if report.passed else "FAIL"
    print(f"{obj.name}: {len(report.errors)} points, max relative error {report.max_error:.3e} "
          f"(tol {args.rel_tol:g}) -> {verdict}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_oracle(args):
    s = settings(args)
    obj = resolve_objective(s)
    cfg = sgd_config(s)
    if args.resolution < 2:
        raise Usage("--resolution must be at least 2")
    res = grid_oracle(obj, obj.domain, args.resolution, cfg.descent)
    print(f"{obj.name} on {obj.domain} at resolution {args.resolution}")
    print(f"grid best   x={res.grid_x.tolist()} f={res.grid_f!r}")
    print(f"polished    x={res.x.tolist()} f={res.f!r}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys mirror the long flag names")
    common.add_argument("--objective", help=f"one of: {', '.join(objective_names())}")
    common.add_argument("--start", help="start point x1,x2,...")
    common.add_argument("--box", help="box override lo1,hi1,lo2,hi2,...")
    common.add_argument("--seed", type=int)
    common.add_argument("--grid-resolution", dest="grid_resolution", type=int)
    common.add_argument("--filter-mode", dest="filter_mode", choices=FILTER_MODES)
    common.add_argument("--max-outer", dest="max_outer", type=int)
    common.add_argument("--out-dir", dest="out_dir", help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    common.add_argument("--format", choices=("csv", "jsonl"))
    common.add_argument("--stationary-tol", dest="stationary_tol", type=float)
    common.add_argument("--level-offset", dest="level_offset", type=float)
    common.add_argument("--empty-refinements", dest="empty_refinements", type=int)
    common.add_argument("--line-search", dest="line_search", choices=("armijo", "exact-sectioned"))
    common.add_argument("--gradient-mode", dest="gradient_mode", choices=("analytic", "central-difference"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="seqdescent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run the sequential descent solver")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("levelset-dump", parents=[common], help="write level-set points as a table")
    p.add_argument("--level", type=float)
    p.add_argument("--at-minimum-of", dest="at_minimum_of", help="descend from this point and use its minimum as the level")
    p.set_defaults(func=cmd_levelset_dump)

    p = sub.add_parser("bench", parents=[common], help="run the benchmark cases")
    p.add_argument("--case", action="append", help="case name (repeatable or comma-separated)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("grad-check", parents=[common], help="compare analytic and finite-difference gradients")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-5)
    p.add_argument("--points", help="explicit points 'x1,x2;x1,x2'")
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("oracle", parents=[common], help="brute-force grid minimum plus one polish")
    p.add_argument("--resolution", type=int, default=400)
    p.set_defaults(func=cmd_oracle)
    return parser


VALUE_FLAGS = ("--start", "--box", "--at-minimum-of", "--points", "--level")


def _glue_values(argv):
    """Turn ``--start -1,3`` into ``--start=-1,3`` so negative values parse."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_values(argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Usage as err:
        print(f"{parser.prog} {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except NumericDomainError as err:
        print(f"{parser.prog} {args.command}: numeric error: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
