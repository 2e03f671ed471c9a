"""Command-line interface: ``macsparse sparsify`` and ``macsparse sweep``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .baselines import greedy_esp, naive_topk
from .g2o import KAPPA_RULE, budget_from_fraction, parse_g2o, to_problem, write_g2o
from .rounding import evaluate_selection
from .solver import mac
from .synthetic import manhattan_problem

log = logging.getLogger("macsparse")

SCHEMA_VERSION = "1.0"
METHODS = ("mac-nearest", "mac-madow", "naive", "greedy-esp")
DEFAULT_FRACTIONS = tuple(round(0.1 * k, 1) for k in range(1, 11))
CSV_COLUMNS = (
    "dataset", "method", "fraction", "K", "lambda2_rounded", "lambda2_relaxed",
    "dual_bound", "duality_gap", "iterations", "wall_time_s", "seed",
)


@dataclass
class RunReport:
    dataset: str
    method: str
    fraction: float | None
    K: int
    lambda2_rounded: float
    lambda2_relaxed: float | None = None
    dual_bound: float | None = None
    duality_gap: float | None = None
    iterations: int | None = None
    wall_time_s: float = 0.0
    seed: int | None = None

    def as_dict(self):
        return dict(schema_version=SCHEMA_VERSION, **asdict(self))


@dataclass
class SolverOptions:
    seed: int = 0
    max_iters: int = 20
    gap_tol: float = 1e-8
    madow_draws: int = 1
    init: str = "naive"


def run_method(problem, method, opts: SolverOptions, dataset="", fraction=None):
    """Run one selector; returns ``(selection, RunReport)``.

    Wall time covers the selector alone (for MAC this includes rounding).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    report = RunReport(dataset, method, fraction, problem.budget, float("nan"), seed=opts.seed)
    if method.startswith("mac-"):
        t0 = time.perf_counter()
        res = mac(problem, rounding=method[4:], max_iters=opts.max_iters, gap_tol=opts.gap_tol,
                  seed=opts.seed, init=opts.init, madow_draws=opts.madow_draws)
        report.wall_time_s = time.perf_counter() - t0
        report.lambda2_rounded = res.f_rounded
        report.lambda2_relaxed = res.f_relaxed
        report.dual_bound = res.best_dual_bound
        report.duality_gap = res.duality_gap
        report.iterations = res.iterations
        return res.rounded_x, report
    selector = naive_topk if method == "naive" else greedy_esp
    t0 = time.perf_counter()
    sel = selector(problem, problem.budget)
    report.wall_time_s = time.perf_counter() - t0
    report.lambda2_rounded = evaluate_selection(problem, sel)
    return sel, report


def load_input(spec: str):
    """A g2o path, or ``synthetic:N:M[:SEED]`` for a generated pose-graph-like instance.

    Returns ``(name, pose_graph_or_None, base_problem)``.
    """
    if spec.startswith("synthetic:"):
        parts = spec.split(":")[1:]
        n, m = int(parts[0]), int(parts[1])
        seed = int(parts[2]) if len(parts) > 2 else 0
        return spec, None, manhattan_problem(n, m, 0, seed=seed)
    pg = parse_g2o(spec)
    return Path(spec).stem, pg, to_problem(pg, 0.0)


def _budget(problem, fraction, budget):
    if budget is not None:
        if not 0 <= budget <= problem.m:
            raise ValueError(f"--budget {budget} outside [0, {problem.m}]")
        return budget
    return budget_from_fraction(fraction, problem.m)


def _fmt_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        d = asdict(r)
        writer.writerow([_fmt_cell(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def reports_to_json(reports) -> str:
    def clean(v):
        return None if isinstance(v, float) and not np.isfinite(v) else v

    rows = [{k: clean(v) for k, v in r.as_dict().items()} for r in reports]
    return json.dumps({"schema_version": SCHEMA_VERSION, "runs": rows}, indent=2) + "\n"


def _emit(text, output):
    if output and output != "-":
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_sparsify(args) -> int:
    name, pg, base = load_input(args.input)
    problem = base.with_budget(_budget(base, args.fraction, args.budget))
    problem.validate()
    opts = SolverOptions(args.seed, args.max_iters, args.gap_tol, args.madow_draws, args.init)
    sel, report = run_method(problem, args.method, opts, name, args.fraction if args.budget is None else None)
    if args.output:
        if pg is None:
            raise SystemExit("--output needs a g2o input")
        write_g2o(pg, sel, args.output, comment=f"{args.method} K={problem.budget} of m={problem.m}")
    text = reports_to_json([report]) if args.format == "json" else reports_to_csv([report])
    if args.format == "json" and pg is not None:
        data = json.loads(text)
        data["kappa_rule"] = KAPPA_RULE[pg.kind]
        text = json.dumps(data, indent=2) + "\n"
    _emit(text, args.report)
    return 0


def cmd_sweep(args) -> int:
    name, _, base = load_input(args.input)
    fractions = [float(f) for f in args.fractions.split(",")] if args.fractions else list(DEFAULT_FRACTIONS)
    methods = args.methods.split(",") if args.methods else list(METHODS)
    for meth in methods:
        if meth not in METHODS:
            raise SystemExit(f"unknown method {meth!r}")
    opts = SolverOptions(args.seed, args.max_iters, args.gap_tol, args.madow_draws, args.init)
    cells = [(meth, fr) for meth in methods for fr in fractions]

    def run_cell(cell):
        meth, fr = cell
        problem = base.with_budget(budget_from_fraction(fr, base.m))
        try:
            return run_method(problem, meth, opts, name, fr)[1], None
        except Exception as exc:  # noqa: BLE001 - reported per cell
            return None, f"{meth} @ {fr}: {type(exc).__name__}: {exc}"

    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(c) for c in cells]

    reports = [r for r, _ in outcomes if r is not None]
    failures = [e for _, e in outcomes if e is not None]
    if args.no_timing:
        for r in reports:
            r.wall_time_s = 0.0
    text = reports_to_json(reports) if args.format == "json" else reports_to_csv(reports)
    _emit(text, args.output)
    for f in failures:
        print(f"failed: {f}", file=sys.stderr)
    return 1 if failures else 0


def _add_solver_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--gap-tol", type=float, default=1e-8)
    p.add_argument("--madow-draws", type=int, default=1)
    p.add_argument("--init", choices=("naive", "uniform"), default="naive")
    p.add_argument("--format", choices=("csv", "json"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macsparse", description="Loop-closure selection by algebraic connectivity maximization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sparsify", help="select a subset of loop closures from a g2o file")
    p.add_argument("input", help="g2o file, or synthetic:N:M[:SEED]")
    p.add_argument("-o", "--output", help="sparsified g2o file to write")
    p.add_argument("--report", default="-", help="report destination (default stdout)")
    p.add_argument("--method", choices=METHODS, default="mac-madow")
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--budget", type=int, default=None, help="absolute K, overrides --fraction")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("sweep", help="run selectors over a range of budgets")
    p.add_argument("input", help="g2o file, or synthetic:N:M[:SEED]")
    p.add_argument("--fractions", default=None, help="comma separated, default 0.1,...,1.0")
    p.add_argument("--methods", default=None, help=f"comma separated subset of {','.join(METHODS)}")
    p.add_argument("--output", default="-")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="zero the wall-time column")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep, format="csv")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("MACSPARSE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
