"""Gradient-cone pruning routines driven by sign and comparator oracles.

These routines locate, at a fixed feasible point, a direction whose angle to
the (isotropic-coordinates) gradient is at most a target angle theta, using
only sub-zeroth-order oracle answers.  They are the per-iteration engine of
the cutting solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import orthonormal_completion, prune_cone


@dataclass
class PruneResult:
    direction: np.ndarray          # isotropic-coordinates unit vector
    angle: float                   # final cone opening angle
    iterations: int
    queries: int
    degenerate: bool = False       # all directions flat (comparator only)
    unknown_directions: list = field(default_factory=list)


def _iteration_cap(n, theta):
    # sin(gamma) shrinks by at least sqrt((n-1)/n) per pruning step; allow a
    # generous multiple for restarts and rounding.
    base = 2 * n * math.log(max(math.pi / (2 * max(theta, 1e-12)), 2.0))
    return 8 * (int(math.ceil(base)) + n + 2)


def prune_direction_dp(oracle, x, theta, transform):
    """Directional-preference pruning.

    Starting from the half-space cone (p = e_1, gamma = pi/2), repeatedly
    queries the sign oracle along an orthonormal frame led by p and shrinks
    the cone until gamma <= theta.  Uses exactly n queries per iteration.
    Returns a PruneResult whose direction satisfies
    angle(direction, grad of f composed with the inverse transform) <= theta.
    """
    n = transform.center.shape[0]
    x = np.asarray(x, dtype=float)
    p = np.zeros(n)
    p[0] = 1.0
    gamma = math.pi / 2
    iters = 0
    queries = 0
    cap = _iteration_cap(n, theta)
    while gamma > theta:
        if iters >= cap:
            raise RuntimeError("direction pruning failed to converge")
        basis = orthonormal_completion([], p)
        directions = basis @ transform.inverse_matrix.T
        signs = []
        for y in directions:
            signs.append(oracle.query_dp(x, y))
            queries += 1
        cone = prune_cone(gamma, signs, basis)
        p, gamma = cone.direction, cone.angle
        iters += 1
    return PruneResult(direction=p, angle=gamma, iterations=iters,
                       queries=queries)


def finite_difference_sign(oracle, transform, direction, step):
    """Sign of the directional derivative of f(T^{-1}(.)) at 0 along a unit
    `direction`, from two comparator queries at isotropic offsets -step and
    +step.

    Returns +1 (increasing), -1 (non-increasing), or None when the pattern is
    a valley: then |<grad, direction>| <= smoothness * step.
    """
    d = np.asarray(direction, dtype=float)
    x = transform.center
    x_left = transform.inverse(-step * d)
    x_right = transform.inverse(step * d)
    q_left = oracle.query_comparator(x_left, x)
    q_right = oracle.query_comparator(x, x_right)
    if q_left == 1 and q_right == 1:
        return 1
    if q_left == -1 and q_right == -1:
        return -1
    return None


def prune_direction_comparator(oracle, x, theta, transform, step):
    """Comparator-driven pruning with an unknown-direction set.

    Directions whose finite-difference sign is a valley (derivative magnitude
    at most smoothness * step) are frozen into the unknown set UD and the
    cone is pruned inside its orthogonal complement.  Uses exactly 2n
    comparator queries per iteration.  When every direction degenerates the
    result direction is e_1 with degenerate=True.
    """
    n = transform.center.shape[0]
    unknown = []
    p = np.zeros(n)
    p[0] = 1.0
    gamma = math.pi / 2
    iters = 0
    queries = 0
    cap = _iteration_cap(n, theta)
    while gamma > theta and len(unknown) < n:
        if iters >= cap:
            raise RuntimeError("comparator pruning failed to converge")
        active = orthonormal_completion(unknown, p)
        # probe the frozen directions too: one round is always 2n queries
        for d in unknown:
            finite_difference_sign(oracle, transform, d, step)
            queries += 2
        signs = []
        for d in active:
            signs.append(finite_difference_sign(oracle, transform, d, step))
            queries += 2
        iters += 1
        unknown_idx = [j for j, s in enumerate(signs) if s is None]
        if unknown_idx:
            j = unknown_idx[0]
            unknown.append(active[j])
            if j == 0:
                # the lead direction itself went flat; rebuild the cone in
                # the remaining complement from whatever signs are known
                rest = active[1:]
                rest_signs = signs[1:]
                known = [k for k, s in enumerate(rest_signs) if s is not None]
                if len(rest) == 0:
                    break
                if len(known) == len(rest):
                    if len(rest) == 1:
                        p, gamma = rest_signs[0] * rest[0], 0.0
                    else:
                        cone = prune_cone(math.pi / 2, rest_signs, rest)
                        p, gamma = cone.direction, cone.angle
                elif known:
                    p, gamma = rest_signs[known[0]] * rest[known[0]], math.pi / 2
                else:
                    p, gamma = rest[0], math.pi / 2
            continue
        if len(active) == 1:
            p, gamma = signs[0] * active[0], 0.0
            break
        cone = prune_cone(gamma, signs, active)
        p, gamma = cone.direction, cone.angle
    if len(unknown) >= n:
        e1 = np.zeros(n)
        e1[0] = 1.0
        return PruneResult(direction=e1, angle=gamma, iterations=iters,
                           queries=queries, degenerate=True,
                           unknown_directions=unknown)
    return PruneResult(direction=p, angle=gamma, iterations=iters,
                       queries=queries, unknown_directions=unknown)


def bisection_tournament(points, oracle, eps):
    """Select an eps-near-best point from `points` using sign-oracle duels.

    Each duel bisects the segment between two candidates, keeping the
    non-ascent half, until the segment is shorter than 2 eps / (L m); the
    midpoint advances.  The winner w satisfies
    f(w) <= min_i f(x_i) + eps.  Uses at most
    (m - 1) * ceil(log2(diam * L * m / (2 eps))) queries.
    """
    m = len(points)
    if m == 0:
        raise ValueError("tournament needs at least one point")
    lipschitz = oracle.problem.lipschitz
    threshold = 2.0 * eps / (lipschitz * m)
    pool = [np.asarray(p, dtype=float) for p in points]
    queries = 0
    while len(pool) > 1:
        x_left, x_right = pool.pop(0), pool.pop(0)
        while np.linalg.norm(x_right - x_left) > threshold:
            mid = (x_left + x_right) / 2.0
            q = oracle.query_dp(mid, (x_right - x_left) / 2.0)
            queries += 1
            if q == -1:
                # descending toward x_right: the minimum is on the right half
                x_left = mid
            else:
                x_right = mid
        pool.append((x_left + x_right) / 2.0)
    return pool[0], queries
