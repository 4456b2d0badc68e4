"""Cutting-scheme solvers driven by sign, comparator, and value oracles.

Each solver maintains an enclosing ellipsoid of the sublevel region, uses an
oracle-driven pruning routine to find a cut direction whose angle to the
gradient is below the shallow-cut threshold, applies the cut, and finally
selects among the visited centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEllipsoidError
from .geometry import halfspace_cut, isotropic, shallow_cut
from .problems import initial_ellipsoid
from .pruning import (bisection_tournament, prune_direction_comparator,
                      prune_direction_dp)
from .trace import IterationRecord, RunTrace


@dataclass
class SolverConfig:
    eps: float
    max_iterations: int = None    # override for the default cut count
    record_trace: bool = True


def dp_cut_count(n, radius, lipschitz, eps):
    """Number of cuts for the sign-oracle and value-oracle solvers."""
    return int(math.ceil(8 * n * (n + 1) * math.log(2 * radius * lipschitz / eps)))


def comparator_cut_count(n, radius, lipschitz, eps):
    return int(math.ceil(8 * n * (n + 1) * math.log(radius * lipschitz / eps)))


def dp_query_bound(n, radius, lipschitz, eps):
    """Query upper bound for the sign-oracle solver."""
    k = dp_cut_count(n, radius, lipschitz, eps)
    prune = int(math.ceil(2 * n * math.log(2 * n)))
    return n * k * prune + k * math.log2(radius * lipschitz * (k + 1) / eps)


def comparator_query_bound(n, radius, lipschitz, eps):
    k = comparator_cut_count(n, radius, lipschitz, eps)
    prune = int(math.ceil(2 * n * math.log(2 * math.sqrt(2) * n) + n))
    return 2 * n * prune * k + k


def value_query_bound(n, radius, lipschitz, eps):
    return (n + 1) * dp_cut_count(n, radius, lipschitz, eps)


def comparator_probe_scale(n):
    """Scale constant kappa for comparator probe steps."""
    inner = math.sqrt((4.0 * n * n - 1.0) / (4.0 * n * n))
    return max(4.0 / (4.0 * n - math.sqrt(2.0) * n * inner), 1.0)


def _repair_center(ellipsoid, domain, margin, max_cuts=64):
    """Cut the ellipsoid with domain halfspaces until the center is feasible
    with the given margin.  Returns (ellipsoid, number of cuts applied)."""
    cuts = 0
    while not domain.contains(ellipsoid.center, margin=margin):
        if cuts >= max_cuts:
            raise DegenerateEllipsoidError(
                "feasibility repair did not converge")
        a, b = domain.separation(ellipsoid.center)
        # keep a tiny extra margin so the repaired center clears the boundary
        ellipsoid = halfspace_cut(ellipsoid, a, b)
        cuts += 1
    return ellipsoid, cuts


def _log_volume(e):
    return 0.5 * e.log_det()


def optimize_dp(problem, oracle, config):
    """Minimize with a directional-preference oracle.

    Runs up to K = ceil(8 n (n+1) ln(2 R L / eps)) shallow cuts at angle
    arcsin(1/(2n)), then selects among the visited centers with a bisection
    tournament at accuracy eps/2.  Output is eps-optimal when the optimum is
    interior (margin sqrt(eps / L)).
    """
    n, radius, lipschitz, eps = (problem.dimension, problem.radius,
                                 problem.lipschitz, config.eps)
    cut_count = config.max_iterations or dp_cut_count(n, radius, lipschitz, eps)
    theta = math.asin(1.0 / (2 * n))
    sin_theta = 1.0 / (2 * n)
    ellipsoid = initial_ellipsoid(problem.domain)
    centers = [ellipsoid.center]
    trace = RunTrace(solver="dp", problem=problem.name, n=n)

    def record(k, phase, cone_angle=None):
        if not config.record_trace:
            return
        f_center = problem.objective(ellipsoid.center)
        trace.add(IterationRecord(
            k=k, phase=phase, queries_cumulative=oracle.query_count,
            f_center=f_center, suboptimality=f_center - problem.optimum_value,
            log_volume=_log_volume(ellipsoid), cone_angle=cone_angle))

    record(0, "init")
    for k in range(1, cut_count + 1):
        if math.sqrt(ellipsoid.lambda_max) <= eps / lipschitz:
            break
        if not problem.domain.contains(ellipsoid.center):
            ellipsoid, _ = _repair_center(ellipsoid, problem.domain, 0.0)
            centers.append(ellipsoid.center)
            record(k, "feasibility")
            continue
        transform = isotropic(ellipsoid)
        result = prune_direction_dp(oracle, ellipsoid.center, theta, transform)
        try:
            ellipsoid = shallow_cut(ellipsoid, result.direction, sin_theta)
        except DegenerateEllipsoidError:
            break
        if problem.domain.contains(ellipsoid.center):
            centers.append(ellipsoid.center)
        record(k, "cut", cone_angle=result.angle)
    winner, _ = bisection_tournament(centers, oracle, eps / 2.0)
    trace.final_point = winner
    trace.final_value = float(problem.objective(winner))
    trace.total_queries = oracle.query_count
    if config.record_trace:
        trace.add(IterationRecord(
            k=len(trace.records), phase="select",
            queries_cumulative=oracle.query_count,
            f_center=trace.final_value,
            suboptimality=trace.final_value - problem.optimum_value))
    return winner, trace


def optimize_comparator(problem, oracle, config):
    """Minimize with a comparator oracle.

    Cuts at the slightly tighter angle arcsin(1/(2 sqrt(2) n)) to absorb the
    finite-difference uncertainty of comparator probes; probe offsets use the
    per-iteration step min(eps, sqrt(lambda_max)) / (kappa n^{5/2}
    max(beta, 1) max(R, 1)).  Finishes with a single-elimination exact
    comparison tournament over the visited centers.
    """
    n, radius, lipschitz, eps = (problem.dimension, problem.radius,
                                 problem.lipschitz, config.eps)
    beta = problem.smoothness
    cut_count = (config.max_iterations
                 or comparator_cut_count(n, radius, lipschitz, eps))
    theta = math.asin(1.0 / (2 * math.sqrt(2) * n))
    sin_theta = 1.0 / (2 * n)
    kappa = comparator_probe_scale(n)
    step_denom = kappa * n ** 2.5 * max(beta, 1.0) * max(radius, 1.0)
    ellipsoid = initial_ellipsoid(problem.domain)
    centers = [ellipsoid.center]
    trace = RunTrace(solver="comparator", problem=problem.name, n=n)

    def record(k, phase, cone_angle=None):
        if not config.record_trace:
            return
        f_center = problem.objective(ellipsoid.center)
        trace.add(IterationRecord(
            k=k, phase=phase, queries_cumulative=oracle.query_count,
            f_center=f_center, suboptimality=f_center - problem.optimum_value,
            log_volume=_log_volume(ellipsoid), cone_angle=cone_angle))

    record(0, "init")
    for k in range(1, cut_count + 1):
        if math.sqrt(ellipsoid.lambda_max) <= eps / lipschitz:
            break
        step = min(eps, math.sqrt(ellipsoid.lambda_max)) / step_denom
        if not problem.domain.contains(ellipsoid.center, margin=step):
            ellipsoid, _ = _repair_center(ellipsoid, problem.domain, step)
            centers.append(ellipsoid.center)
            record(k, "feasibility")
            continue
        transform = isotropic(ellipsoid)
        result = prune_direction_comparator(
            oracle, ellipsoid.center, theta, transform, step)
        # a fully degenerate point is near-stationary; still cut along e_1 to
        # keep making volume progress
        try:
            ellipsoid = shallow_cut(ellipsoid, result.direction, sin_theta)
        except DegenerateEllipsoidError:
            break
        if problem.domain.contains(ellipsoid.center):
            centers.append(ellipsoid.center)
        record(k, "cut", cone_angle=result.angle)
    best = centers[0]
    for cand in centers[1:]:
        if oracle.query_comparator(best, cand) == -1:
            best = cand
    trace.final_point = best
    trace.final_value = float(problem.objective(best))
    trace.total_queries = oracle.query_count
    if config.record_trace:
        trace.add(IterationRecord(
            k=len(trace.records), phase="select",
            queries_cumulative=oracle.query_count,
            f_center=trace.final_value,
            suboptimality=trace.final_value - problem.optimum_value))
    return best, trace


def optimize_value(problem, oracle, config):
    """Minimize with an exact value oracle.

    Estimates the isotropic gradient with n forward differences at sampling
    distance d = eps / (2 (2n+1) sqrt(n) beta R); cuts whenever the estimate
    dominates its uncertainty half-width sqrt(n) beta d / 2 by the shallow
    cut margin, and otherwise stops early (the center is near-optimal).
    Returns the best center by observed value.  Uses at most (n+1) K queries.
    """
    n, radius, lipschitz, eps = (problem.dimension, problem.radius,
                                 problem.lipschitz, config.eps)
    beta = problem.smoothness
    cut_count = config.max_iterations or dp_cut_count(n, radius, lipschitz, eps)
    sin_theta = 1.0 / (2 * n)
    d = eps / ((2 * n + 1) * math.sqrt(n) * beta * radius * 2.0)
    ellipsoid = initial_ellipsoid(problem.domain)
    trace = RunTrace(solver="value", problem=problem.name, n=n)
    best_point, best_value = None, math.inf

    def record(k, phase, cone_angle=None, f_center=None):
        if not config.record_trace:
            return
        if f_center is None:
            f_center = problem.objective(ellipsoid.center)
        trace.add(IterationRecord(
            k=k, phase=phase, queries_cumulative=oracle.query_count,
            f_center=f_center, suboptimality=f_center - problem.optimum_value,
            log_volume=_log_volume(ellipsoid), cone_angle=cone_angle))

    record(0, "init")
    for k in range(1, cut_count + 1):
        if math.sqrt(ellipsoid.lambda_max) <= eps / lipschitz:
            break
        if not problem.domain.contains(ellipsoid.center, margin=d):
            ellipsoid, _ = _repair_center(ellipsoid, problem.domain, d)
            record(k, "feasibility")
            continue
        transform = isotropic(ellipsoid)
        f0 = oracle.query_value(ellipsoid.center)
        if f0 < best_value:
            best_point, best_value = ellipsoid.center, f0
        estimate = np.empty(n)
        for j in range(n):
            offset = np.zeros(n)
            offset[j] = d
            estimate[j] = (oracle.query_value(transform.inverse(offset)) - f0) / d
        half_width = math.sqrt(n) * beta * d / 2.0
        norm = float(np.linalg.norm(estimate))
        if norm < 2 * n * half_width:
            # gradient indistinguishable from the uncertainty: near-optimal
            record(k, "early_exit", f_center=f0)
            break
        try:
            ellipsoid = shallow_cut(ellipsoid, estimate, sin_theta)
        except DegenerateEllipsoidError:
            break
        record(k, "cut")
    if best_point is None:
        best_point = ellipsoid.center
        best_value = float(problem.objective(best_point))
    trace.final_point = best_point
    trace.final_value = best_value
    trace.total_queries = oracle.query_count
    return best_point, trace


SOLVERS = {
    "dp": optimize_dp,
    "comparator": optimize_comparator,
    "value": optimize_value,
}
