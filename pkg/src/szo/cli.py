"""Benchmark CLI: run solvers, verify their bounds, and emit traces.

Exit codes: 0 when all verified bounds hold, 2 when a bound check fails,
1 for configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

import numpy as np

from . import oracles, problems, regret, solvers, trace
from .errors import SzoError

SOLVER_NAMES = ("dp", "comparator", "value", "regret-nv")


def _parse_int_list(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="szo",
        description="Benchmark harness for sub-zeroth-order convex "
                    "optimization solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--solver", default="dp",
                       help=f"solver name(s), comma separated: {SOLVER_NAMES}")
        p.add_argument("--problem", default="quadratic",
                       choices=("quadratic", "logsumexp", "smoothed_norm"),
                       help="problem kind when no config file is given")
        p.add_argument("--n", default="2", help="dimension(s), comma separated")
        p.add_argument("--eps", type=float, default=1e-2,
                       help="target accuracy for the accuracy solvers")
        p.add_argument("--T", type=int, default=100_000,
                       help="query horizon for regret-nv")
        p.add_argument("--delta", type=float, default=0.1,
                       help="failure probability for regret-nv")
        p.add_argument("--sigma", type=float, default=0.05,
                       help="noise level for regret-nv")
        p.add_argument("--max-queries", type=int, default=None,
                       help="hard oracle budget override")
        p.add_argument("--out", default=None,
                       help="trace output path (file for run, directory for "
                            "sweep)")
        p.add_argument("--format", default="csv", choices=("csv", "json"))

    run_p = sub.add_parser("run", help="run one configuration")
    common(run_p)
    run_p.add_argument("--seed", type=int, default=0)

    sweep_p = sub.add_parser("sweep", help="run a grid of configurations")
    common(sweep_p)
    sweep_p.add_argument("--seeds", default="0",
                         help="comma-separated seed list")
    sweep_p.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes")
    return parser


def execute_cell(spec):
    """Run one (solver, problem, seed) cell.  Returns a report dict plus the
    trace object.  Pure function of the spec: safe to run in a worker."""
    solver = spec["solver"]
    problem = problems.from_config(spec["problem"])
    seed = spec["seed"]
    eps = spec["eps"]
    run_id = spec["run_id"]
    budget = spec.get("max_queries")

    if solver == "regret-nv":
        horizon = spec["T"]
        oracle = oracles.for_solver(problem, solver, sigma=spec["sigma"],
                                    seed=seed,
                                    budget=budget if budget is not None
                                    else horizon)
        cfg = regret.RegretConfig(horizon=horizon, delta=spec["delta"])
        point, rtrace = regret.minimize_regret(problem, oracle, cfg)
        bound = regret.regret_bound(problem, spec["sigma"], cfg)
        measured = rtrace.cumulative_regret
        checks = {
            "regret_bound": {"measured": measured, "bound": bound,
                             "holds": measured <= bound},
            "budget_exact": {"measured": oracle.query_count,
                             "bound": horizon,
                             "holds": oracle.query_count <= horizon},
        }
        run_trace = rtrace.run
        final_sub = problem.suboptimality(point)
    else:
        oracle = oracles.for_solver(problem, solver, seed=seed, budget=budget)
        cfg = solvers.SolverConfig(eps=eps)
        point, run_trace = solvers.SOLVERS[solver](problem, oracle, cfg)
        n = problem.dimension
        bound_fn = {"dp": solvers.dp_query_bound,
                    "comparator": solvers.comparator_query_bound,
                    "value": solvers.value_query_bound}[solver]
        qbound = bound_fn(n, problem.radius, problem.lipschitz, eps)
        final_sub = problem.suboptimality(point)
        checks = {
            "suboptimality": {"measured": final_sub, "bound": eps,
                              "holds": final_sub <= eps},
            "query_bound": {"measured": oracle.query_count, "bound": qbound,
                            "holds": oracle.query_count <= qbound},
        }
    report = {
        "run_id": run_id,
        "solver": solver,
        "problem": run_trace.problem,
        "n": problem.dimension,
        "seed": seed,
        "queries": oracle.query_count,
        "final_suboptimality": final_sub,
        "checks": checks,
        "bounds_hold": all(c["holds"] for c in checks.values()),
    }
    return report, run_trace


def _spec_for(args, solver, n, seed):
    if args.config:
        cfg = problems.load_config(args.config)
        pcfg = dict(cfg.get("problem", {}))
        pcfg.setdefault("kind", getattr(args, "problem", "quadratic"))
    else:
        pcfg = {"kind": args.problem}
    pcfg["n"] = pcfg.get("n", n)
    pcfg["seed"] = seed
    run_id = f"{solver}-{pcfg['kind']}-n{pcfg['n']}-s{seed}"
    return {
        "solver": solver, "problem": pcfg, "seed": seed, "eps": args.eps,
        "T": args.T, "delta": args.delta, "sigma": args.sigma,
        "max_queries": args.max_queries, "run_id": run_id,
    }


def _write_trace(run_trace, run_id, out, fmt):
    if out is None:
        return None
    text = (run_trace.to_csv(run_id) if fmt == "csv"
            else run_trace.to_json(run_id))
    trace.write_atomic(out, text)
    return out


def cmd_run(args):
    ns = _parse_int_list(args.n)
    if len(ns) != 1:
        raise SzoError("run takes a single dimension; use sweep for lists")
    if args.solver not in SOLVER_NAMES:
        raise SzoError(f"unknown solver {args.solver!r}")
    spec = _spec_for(args, args.solver, ns[0], args.seed)
    report, run_trace = execute_cell(spec)
    path = _write_trace(run_trace, report["run_id"], args.out, args.format)
    if path:
        report["trace_path"] = path
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if report["bounds_hold"] else 2


def cmd_sweep(args):
    solver_list = [s for s in args.solver.split(",") if s]
    for s in solver_list:
        if s not in SOLVER_NAMES:
            raise SzoError(f"unknown solver {s!r}")
    ns = _parse_int_list(args.n)
    seeds = _parse_int_list(args.seeds)
    specs = [_spec_for(args, s, n, seed)
             for s in solver_list for n in ns for seed in seeds]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=args.jobs) as pool:
            results = list(pool.map(execute_cell, specs))
    else:
        results = [execute_cell(spec) for spec in specs]
    reports = []
    for spec, (report, run_trace) in zip(specs, results):
        if args.out:
            ext = "csv" if args.format == "csv" else "json"
            path = os.path.join(args.out, f"{report['run_id']}.{ext}")
            report["trace_path"] = _write_trace(run_trace, report["run_id"],
                                                path, args.format)
        reports.append(report)
    summary = {
        "cells": reports,
        "all_bounds_hold": all(r["bounds_hold"] for r in reports),
        "median_suboptimality": float(np.median(
            [r["final_suboptimality"] for r in reports])),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["all_bounds_hold"] else 2


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(args)
        return cmd_sweep(args)
    except SzoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
