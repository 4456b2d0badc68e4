import json
import math

import numpy as np
import pytest

from szo import (ConfigurationError, ball, box, default_suite, from_config,
                 initial_ellipsoid, make_logsumexp, make_quadratic,
                 make_smoothed_norm)
from szo.problems import load_config


def test_ball_domain():
    d = ball([0.0, 0.0], 1.0)
    assert d.contains([0.5, 0.5])
    assert not d.contains([0.8, 0.8])
    assert not d.contains([0.95, 0.0], margin=0.1)
    assert d.circumradius() == 1.0
    a, b = d.separation([2.0, 0.0])
    np.testing.assert_allclose(a, [1.0, 0.0])
    assert b == pytest.approx(1.0)


def test_box_domain():
    d = box([0.0, 0.0], [1.0, 2.0])
    assert d.contains([0.9, -1.9])
    assert not d.contains([1.1, 0.0])
    assert d.circumradius() == pytest.approx(math.sqrt(5.0))
    a, b = d.separation([1.5, 0.0])
    np.testing.assert_allclose(a, [1.0, 0.0])
    assert b == pytest.approx(1.0)
    a, b = d.separation([0.0, -3.0])
    np.testing.assert_allclose(a, [0.0, -1.0])
    assert b == pytest.approx(2.0)


def test_separation_halfspace_contains_domain():
    rng = np.random.default_rng(2)
    for d in (ball([0.3, -0.2], 1.5), box([0.0, 1.0], [1.0, 0.5])):
        for x in rng.standard_normal((50, 2)) * 3.0:
            a, b = d.separation(x)
            for y in d.sample(rng, 50):
                assert a @ y <= b + 1e-9
            if not d.contains(x):
                assert a @ x > b - 1e-12


def test_initial_ellipsoid_ball():
    e = initial_ellipsoid(ball([1.0, 2.0], 3.0))
    np.testing.assert_allclose(e.shape, 9.0 * np.eye(2))
    np.testing.assert_allclose(e.center, [1.0, 2.0])


def test_initial_ellipsoid_box_contains_corners():
    d = box([0.0, 0.0, 0.0], [1.0, 2.0, 0.5])
    e = initial_ellipsoid(d)
    np.testing.assert_allclose(e.shape, 3.0 * np.diag([1.0, 4.0, 0.25]))
    # corners are exactly on the boundary of the minimum-volume ellipsoid
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                corner = np.array([sx * 1.0, sy * 2.0, sz * 0.5])
                assert e.membership(corner) == pytest.approx(1.0, rel=1e-12)


def test_initial_ellipsoid_covers_samples_and_radius_bound():
    rng = np.random.default_rng(4)
    for d in (ball([0.5, -0.5], 2.0), box([0.0, 0.0], [0.3, 1.7])):
        e = initial_ellipsoid(d)
        for x in d.sample(rng, 200):
            assert e.contains(x, tol=1e-9)
        # sqrt(lambda_max) <= n * circumradius
        assert math.sqrt(e.lambda_max) <= d.dim * d.circumradius() + 1e-12


def test_quadratic_constants_and_values():
    dom = ball([0.0, 0.0], 1.0)
    Q = np.diag([1.0, 4.0])
    xs = np.array([0.2, -0.1])
    p = make_quadratic(2, Q, xs, dom)
    assert p.smoothness == pytest.approx(4.0)
    # L = beta * max distance from x* over the ball
    assert p.lipschitz == pytest.approx(4.0 * (1.0 + math.hypot(0.2, 0.1)))
    assert p.optimum_value == 0.0
    assert p.objective(xs) == 0.0
    assert p.objective([1.2, -0.1]) == pytest.approx(0.5)
    np.testing.assert_allclose(p.gradient([1.2, -0.1]), [1.0, 0.0])
    assert p.suboptimality(xs) == 0.0


def test_quadratic_rejects_exterior_minimizer():
    with pytest.raises(ValueError):
        make_quadratic(2, np.eye(2), np.array([2.0, 0.0]), ball([0.0, 0.0], 1.0))


def test_logsumexp_opposed_pair():
    # directions {e1, -e1}: f(x) = t log(2 cosh(x1 / t)), minimum t log 2
    dom = ball([0.0, 0.0], 1.0)
    p = make_logsumexp(2, np.array([[1.0, 0.0], [-1.0, 0.0]]), 0.5, dom)
    assert p.lipschitz == pytest.approx(1.0)
    assert p.smoothness == pytest.approx(2.0)
    assert p.objective([0.0, 0.3]) == pytest.approx(0.5 * math.log(2.0))
    assert p.optimum_value == pytest.approx(0.5 * math.log(2.0), abs=1e-10)


def test_logsumexp_simplex_reference_optimum():
    # simplex directions have the unique analytic minimizer 0 with value
    # t log(n + 1); the stored reference optimum must match to high accuracy
    n = 3
    A = np.vstack([np.eye(n), -np.ones((1, n))])
    p = make_logsumexp(n, A, 0.5, ball(np.full(n, 0.2), 1.0))
    assert p.optimum_value == pytest.approx(0.5 * math.log(n + 1.0), abs=1e-10)
    assert np.linalg.norm(p.optimum_point) < 1e-6
    assert "optimum_provenance" in p.metadata


def test_smoothed_norm_constants():
    p = make_smoothed_norm(2, np.array([0.1, 0.1]), 0.25, ball([0.0, 0.0], 1.0))
    assert p.optimum_value == 0.25
    assert p.lipschitz == 1.0
    assert p.smoothness == 4.0
    assert p.objective([0.1, 0.1]) == 0.25
    g = p.gradient([0.6, 0.1])
    assert np.linalg.norm(g) < 1.0


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(8)
    for p in default_suite(3, seed=5):
        for _ in range(5):
            x = p.domain.sample(rng, 1)[0] * 0.5
            g = p.gradient(x)
            h = 1e-6
            fd = np.empty(3)
            for j in range(3):
                step = np.zeros(3)
                step[j] = h
                fd[j] = (p.objective(x + step) - p.objective(x - step)) / (2 * h)
            np.testing.assert_allclose(g, fd, atol=1e-5)


def test_suite_shapes_and_interiority():
    for n in (2, 5):
        suite = default_suite(n, seed=3)
        assert [p.metadata["kind"] for p in suite] == [
            "quadratic", "logsumexp", "smoothed_norm"]
        for p in suite:
            assert p.dimension == n
            assert p.domain.contains(p.optimum_point)
            assert p.check_interior(1e-2)
            assert p.lipschitz > 0 and p.smoothness > 0
            # optimum value is a true lower bound near the optimum
            rng = np.random.default_rng(0)
            for x in p.domain.sample(rng, 100):
                assert p.objective(x) >= p.optimum_value - 1e-9


def test_suite_convexity_sampling():
    rng = np.random.default_rng(12)
    for p in default_suite(2, seed=7):
        for _ in range(50):
            x, y = p.domain.sample(rng, 2)
            lam = rng.random()
            mid = lam * x + (1 - lam) * y
            assert p.objective(mid) <= (lam * p.objective(x)
                                        + (1 - lam) * p.objective(y) + 1e-9)


def test_from_config_round_trip(tmp_path):
    cfg = {"kind": "quadratic", "n": 2, "seed": 9,
           "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}}
    p1 = from_config(cfg)
    p2 = from_config(cfg)
    np.testing.assert_allclose(p1.optimum_point, p2.optimum_point)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert load_config(path)["kind"] == "quadratic"


def test_from_config_validation():
    with pytest.raises(ConfigurationError):
        from_config({"kind": "nope", "n": 2})
    with pytest.raises(ConfigurationError):
        from_config({"kind": "quadratic"})
    with pytest.raises(ConfigurationError):
        from_config({"kind": "quadratic", "n": 1})
    with pytest.raises(ConfigurationError):
        from_config({"kind": "quadratic", "n": 2,
                     "domain": {"kind": "box"}})


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(ConfigurationError):
        load_config(path)
