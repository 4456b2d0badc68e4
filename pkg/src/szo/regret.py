"""Noisy-value regret minimization over a fixed query horizon.

Three phases against a noisy value oracle with a hard budget of exactly T
queries:

1. cutting rounds: repeated-sampling finite differences estimate the
   isotropic gradient; when the estimate dominates its confidence width the
   ellipsoid is shallow-cut and the new center stored.  The per-round
   sampling escalates (halving the width, multiplying the sample count by
   16) until a cut fires.
2. screening: every stored center is re-sampled and the lowest empirical
   mean is selected.
3. exploitation: the selected point is queried for the remaining budget.

Regret is accounted against the ground-truth optimum for every query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateEllipsoidError
from .geometry import isotropic, shallow_cut
from .problems import initial_ellipsoid
from .solvers import _repair_center
from .trace import IterationRecord, RunTrace


@dataclass
class RegretConfig:
    horizon: int                 # total query budget T
    delta: float = 0.1           # failure probability for the guarantees
    record_trace: bool = True


@dataclass
class BatchRecord:
    phase: str
    round_index: int
    level: int
    count: int
    value: float                 # ground-truth f at the queried point
    instantaneous_regret: float


@dataclass
class RegretTrace:
    run: RunTrace
    batches: list = field(default_factory=list)
    cumulative_regret: float = 0.0
    phase3_point: np.ndarray = None
    phase3_value: float = None

    def per_query_regret(self):
        """Expand batch records into the length-T per-query regret array."""
        parts = [np.full(b.count, b.instantaneous_regret) for b in self.batches]
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)


def regret_cut_count(n, radius, lipschitz, horizon):
    return int(math.ceil(8 * n * (n + 1)
                         * math.log(2 * radius * lipschitz * horizon ** 0.25)))


def _sampling_constants(n, radius, lipschitz, sigma, delta, horizon):
    k = regret_cut_count(n, radius, lipschitz, horizon)
    level_cap = math.log(15.0 * horizon / (2.0 * n)) / math.log(16.0)
    delta_inner = delta / (4.0 * n * k * max(level_cap, 1.0))
    tau = max(1, int(math.ceil(32.0 * sigma ** 2 * n ** 4
                               * math.log(2.0 / delta_inner))))
    screen = max(1, int(math.ceil(32.0 * sigma ** 2 * math.sqrt(horizon)
                                  * math.log(2.0 * (k + 1) / delta))))
    return k, delta_inner, tau, screen, level_cap


def regret_bound(problem, sigma, config):
    """Closed-form high-probability regret bound for a run with these
    parameters (holds with probability at least 1 - 2 delta)."""
    n, radius, lipschitz = (problem.dimension, problem.radius,
                            problem.lipschitz)
    beta = problem.smoothness
    horizon, delta = config.horizon, config.delta
    k, _, tau, screen, _ = _sampling_constants(
        n, radius, lipschitz, sigma, delta, horizon)
    return (k * (radius * lipschitz * tau
                 + 5.0 * horizon ** 0.75 * n ** -0.25
                 * max(n * radius, 1.0) * (1.0 + beta) * tau ** 0.25)
            + (k + 1) * screen * radius * lipschitz
            + horizon ** 0.75)


def rescale_to_unit_smoothness(problem):
    """Return an equivalent instance with smoothness 1 over the domain scaled
    by sqrt(beta): f'(y) = f(y / sqrt(beta)).  Map points back by dividing by
    sqrt(beta).  Constants transform as L' = L / sqrt(beta), R' = sqrt(beta) R.
    """
    from .problems import Domain, ProblemInstance

    beta = problem.smoothness
    s = math.sqrt(beta)
    dom = problem.domain
    if dom.kind == "ball":
        new_dom = Domain("ball", s * dom.center, radius=s * dom.radius)
    else:
        new_dom = Domain("box", s * dom.center,
                         half_widths=s * dom.half_widths)
    inner_objective = problem.objective
    inner_gradient = problem.gradient
    return ProblemInstance(
        name=problem.name + "-rescaled",
        dimension=problem.dimension,
        objective=lambda y: inner_objective(np.asarray(y, dtype=float) / s),
        gradient=lambda y: inner_gradient(np.asarray(y, dtype=float) / s) / s,
        domain=new_dom,
        lipschitz=problem.lipschitz / s,
        smoothness=1.0,
        optimum_value=problem.optimum_value,
        optimum_point=s * problem.optimum_point,
        metadata=dict(problem.metadata, rescale=s),
    )


def minimize_regret(problem, oracle, config):
    """Run the three-phase noisy-value scheme for exactly `config.horizon`
    queries.  Returns (selected point, RegretTrace)."""
    n, radius, lipschitz = (problem.dimension, problem.radius,
                            problem.lipschitz)
    beta = problem.smoothness
    sigma = oracle.sigma
    horizon, delta = config.horizon, config.delta
    if horizon < 1:
        raise ConfigurationError("horizon must be positive")
    cut_count, _, tau, screen, level_cap = _sampling_constants(
        n, radius, lipschitz, sigma, delta, horizon)
    min_round = (n + 1) * tau
    if horizon < min_round + 2:
        raise ConfigurationError(
            f"horizon too small for one sampling round; need at least "
            f"{min_round + 2}")
    if oracle.budget is not None and oracle.budget < horizon:
        raise ConfigurationError("oracle budget is below the horizon")

    run = RunTrace(solver="regret-nv", problem=problem.name, n=n)
    trace = RegretTrace(run=run)
    f_star = problem.optimum_value
    state = {"spent": 0, "regret": 0.0}

    def sample_mean(point, count, phase, round_index=0, level=0):
        values = oracle.query_noisy_value_batch(point, count)
        f_true = problem.objective(point)
        inst = f_true - f_star
        state["spent"] += count
        state["regret"] += inst * count
        trace.batches.append(BatchRecord(
            phase=phase, round_index=round_index, level=level, count=count,
            value=float(f_true), instantaneous_regret=float(inst)))
        return float(np.mean(values))

    def remaining():
        return horizon - state["spent"]

    ellipsoid = initial_ellipsoid(problem.domain)
    centers = [ellipsoid.center]
    sin_theta = 1.0 / (2 * n)
    early_eps = horizon ** -0.25

    def record(k, phase, *, f_center=None, log_volume=None):
        if not config.record_trace:
            return
        if f_center is None:
            f_center = float(problem.objective(ellipsoid.center))
        run.add(IterationRecord(
            k=k, phase=phase, queries_cumulative=state["spent"],
            f_center=f_center, suboptimality=f_center - f_star,
            log_volume=log_volume,
            instantaneous_regret=f_center - f_star,
            cumulative_regret=state["regret"]))

    # ---- phase 1: cutting rounds -------------------------------------
    phase1_done = False
    for k in range(1, cut_count + 1):
        if math.sqrt(ellipsoid.lambda_max) <= early_eps / lipschitz:
            break
        lam = ellipsoid.lambda_max
        d = min(math.sqrt(lam), 1.0) / (2 * n)
        width = d * (2.0 + beta * lam) / (2.0 * lam)
        try:
            repaired, cuts = _repair_center(ellipsoid, problem.domain, d)
        except (DegenerateEllipsoidError, ValueError):
            break
        if cuts:
            ellipsoid = repaired
            centers.append(ellipsoid.center)
            record(k, "phase1-feasibility",
                   log_volume=0.5 * ellipsoid.log_det())
            continue
        transform = isotropic(ellipsoid)
        level = 0
        cut_fired = False
        while True:
            d_i = d / 2 ** level
            width_i = width / 2 ** level
            tau_i = 16 ** level * tau
            # keep a reserve so screening can sample every stored center
            reserve = (len(centers) + 1) * screen
            cost = (n + 1) * tau_i
            if state["spent"] + cost + reserve > horizon or level > level_cap:
                phase1_done = True
                break
            mean_center = sample_mean(ellipsoid.center, tau_i, "phase1",
                                      round_index=k, level=level)
            estimate = np.empty(n)
            for j in range(n):
                offset = np.zeros(n)
                offset[j] = d_i
                mean_j = sample_mean(transform.inverse(offset), tau_i,
                                     "phase1", round_index=k, level=level)
                estimate[j] = (mean_j - mean_center) / d_i
            norm = float(np.linalg.norm(estimate))
            if norm > math.sqrt(n) * width_i and \
                    math.sqrt(n) * width_i / norm <= sin_theta:
                ellipsoid = shallow_cut(ellipsoid, estimate, sin_theta)
                if problem.domain.contains(ellipsoid.center):
                    centers.append(ellipsoid.center)
                cut_fired = True
                break
            level += 1
        record(k, "phase1", log_volume=0.5 * ellipsoid.log_det())
        if phase1_done and not cut_fired:
            break

    # ---- phase 2: screening ------------------------------------------
    means = []
    screened = []
    for idx, point in enumerate(centers):
        budget_left = remaining() - 1   # keep one query for phase 3
        if budget_left < 1:
            break
        count = min(screen, budget_left)
        means.append(sample_mean(point, count, "phase2", round_index=idx))
        screened.append(point)
    if screened:
        best_idx = int(np.argmin(means))
        selected = screened[best_idx]
        incomplete = False
    else:
        selected = centers[-1]
        incomplete = True
    record(len(run.records), "phase2",
           f_center=float(problem.objective(selected)))

    # ---- phase 3: exploitation ---------------------------------------
    if remaining() > 0:
        sample_mean(selected, remaining(), "phase3")
    record(len(run.records), "phase3",
           f_center=float(problem.objective(selected)))

    trace.cumulative_regret = state["regret"]
    trace.phase3_point = selected
    trace.phase3_value = float(problem.objective(selected))
    run.final_point = selected
    run.final_value = trace.phase3_value
    run.total_queries = state["spent"]
    run.incomplete = incomplete
    return selected, trace
