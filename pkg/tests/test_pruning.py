import math

import numpy as np
import pytest

from szo import (Ellipsoid, OracleHandle, ball, bisection_tournament,
                 finite_difference_sign, isotropic, make_quadratic,
                 prune_direction_comparator, prune_direction_dp)


def quad_problem(n, target_scale=0.3, radius=1.0, seed=0):
    rng = np.random.default_rng(seed)
    q = np.eye(n)
    star = rng.standard_normal(n)
    star = target_scale * star / np.linalg.norm(star)
    return make_quadratic(n, q, star, ball(np.zeros(n), radius))


def centered_transform(problem, center=None, scale=0.25):
    n = problem.dimension
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    e = Ellipsoid(shape=scale**2 * np.eye(n), center=c)
    return isotropic(e)


def isotropic_gradient(problem, transform):
    g = problem.gradient(transform.center)
    g_iso = transform.pullback_gradient(g)
    return g_iso / np.linalg.norm(g_iso)


def test_dp_pruning_angle_and_query_invariants():
    for n in (2, 3, 5):
        for seed in range(4):
            problem = quad_problem(n, seed=seed)
            transform = centered_transform(problem)
            theta = math.asin(1.0 / (2.0 * n))
            oracle = OracleHandle(problem=problem, kind="dp")
            res = prune_direction_dp(oracle, transform.center, theta,
                                     transform)
            # exactly n queries per iteration
            assert res.queries == n * res.iterations
            assert oracle.query_count == res.queries
            assert res.angle <= theta + 1e-12
            # gradient of the pulled-back objective lies inside the cone
            g_hat = isotropic_gradient(problem, transform)
            cos_ang = float(np.clip(np.dot(res.direction, g_hat), -1.0, 1.0))
            assert math.acos(cos_ang) <= theta + 1e-9


def test_dp_pruning_iteration_bound_small_dim():
    # the cone half-angle sine shrinks by sqrt((n-1)/n) per round, so at
    # theta = arcsin(1/(2n)) the round count is at most ceil(2 n ln(2 n))
    n = 2
    cap = math.ceil(2 * n * math.log(2 * n))
    theta = math.asin(1.0 / (2.0 * n))
    for seed in range(10):
        problem = quad_problem(n, seed=seed)
        transform = centered_transform(problem)
        oracle = OracleHandle(problem=problem, kind="dp")
        res = prune_direction_dp(oracle, transform.center, theta, transform)
        assert res.iterations <= cap


def test_finite_difference_sign_examples():
    # f(x) = 0.5 x1^2 on the plane: at center (1, 0) the x1-derivative is
    # positive; at (-1, 0) negative; at the minimizer the pattern is a valley
    problem = make_quadratic(2, np.diag([1.0, 0.0]) + 1e-12 * np.eye(2),
                             np.zeros(2), ball(np.zeros(2), 3.0))
    e1 = np.array([1.0, 0.0])
    t = 0.05
    tr_pos = centered_transform(problem, center=[1.0, 0.0], scale=0.2)
    oracle = OracleHandle(problem=problem, kind="comparator")
    assert finite_difference_sign(oracle, tr_pos, e1, t) == 1
    tr_neg = centered_transform(problem, center=[-1.0, 0.0], scale=0.2)
    assert finite_difference_sign(oracle, tr_neg, e1, t) == -1
    tr_min = centered_transform(problem, center=[0.0, 0.0], scale=0.2)
    assert finite_difference_sign(oracle, tr_min, e1, t) is None
    # the flat x2 direction is always a valley
    e2 = np.array([0.0, 1.0])
    assert finite_difference_sign(oracle, tr_pos, e2, t) is None
    assert oracle.query_count == 8


def test_finite_difference_valley_implies_small_derivative():
    # whenever the sign is None, |<grad g, d>| <= beta * t for the
    # pulled-back objective g = f o T^{-1}
    rng = np.random.default_rng(7)
    for trial in range(200):
        n = int(rng.integers(2, 5))
        problem = quad_problem(n, seed=trial)
        center = rng.uniform(-0.3, 0.3, size=n)
        transform = centered_transform(problem, center=center, scale=0.3)
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        t = float(rng.uniform(0.01, 0.2))
        oracle = OracleHandle(problem=problem, kind="comparator")
        s = finite_difference_sign(oracle, transform, d, t)
        if s is None:
            g_iso = transform.pullback_gradient(problem.gradient(center))
            assert abs(float(np.dot(g_iso, d))) <= problem.smoothness * t + 1e-12


def test_comparator_pruning_matches_dp_direction():
    for n in (2, 3):
        for seed in range(4):
            problem = quad_problem(n, seed=seed)
            transform = centered_transform(problem, center=0.35 * np.ones(n),
                                           scale=0.2)
            theta = math.asin(1.0 / (2.0 * math.sqrt(2) * n))
            step = 1e-6
            oracle = OracleHandle(problem=problem, kind="comparator")
            res = prune_direction_comparator(oracle, transform.center, theta,
                                             transform, step)
            assert res.queries == oracle.query_count
            assert res.queries % (2 * n) == 0   # 2n queries per round
            if not res.degenerate:
                g_hat = isotropic_gradient(problem, transform)
                cos_ang = float(np.clip(np.dot(res.direction, g_hat),
                                        -1.0, 1.0))
                # unknown directions widen the guarantee; with a tiny step on
                # a generic quadratic nothing degenerates and the cone bound
                # holds directly
                assert not res.unknown_directions
                assert math.acos(cos_ang) <= theta + 1e-6


def test_comparator_pruning_degenerates_at_minimizer():
    n = 3
    problem = make_quadratic(n, np.eye(n), np.zeros(n),
                             ball(np.zeros(n), 1.0))
    transform = centered_transform(problem, center=np.zeros(n), scale=0.2)
    theta = math.asin(1.0 / (2.0 * math.sqrt(2) * n))
    # a step large enough that every direction is a valley at the minimizer
    oracle = OracleHandle(problem=problem, kind="comparator")
    res = prune_direction_comparator(oracle, transform.center, theta,
                                     transform, 0.05)
    assert res.degenerate
    assert len(res.unknown_directions) == n
    np.testing.assert_allclose(res.direction, np.eye(n)[0])
    # one direction per round, 2n queries per round
    assert res.queries == 2 * n * n


def test_bisection_tournament_selects_near_best():
    problem = quad_problem(3, seed=11)
    rng = np.random.default_rng(3)
    points = [problem.domain.sample(rng)[0] * 0.8 for _ in range(6)]
    eps = 1e-3
    oracle = OracleHandle(problem=problem, kind="dp")
    winner, queries = bisection_tournament(points, oracle, eps)
    best = min(problem.objective(p) for p in points)
    assert problem.objective(winner) <= best + eps
    assert queries == oracle.query_count
    m = len(points)
    diam = max(np.linalg.norm(a - b) for a in points for b in points)
    per_duel = math.ceil(math.log2(max(diam * problem.lipschitz * m /
                                       (2 * eps), 2.0)))
    assert queries <= (m - 1) * (per_duel + 1)


def test_bisection_tournament_single_point():
    problem = quad_problem(2)
    pt = np.array([0.1, 0.2])
    oracle = OracleHandle(problem=problem, kind="dp")
    winner, queries = bisection_tournament([pt], oracle, 1e-2)
    np.testing.assert_allclose(winner, pt)
    assert queries == 0
