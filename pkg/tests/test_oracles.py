import numpy as np
import pytest

from szo import (BudgetExhaustedError, InfeasibleQueryError, OracleHandle,
                 ball, make_quadratic)


@pytest.fixture
def problem():
    # f(x) = 0.5 ||x - (0.2, 0)||^2 on the unit ball
    return make_quadratic(2, np.eye(2), np.array([0.2, 0.0]),
                          ball([0.0, 0.0], 1.0))


def test_dp_signs(problem):
    o = OracleHandle(problem=problem, kind="dp")
    x = np.array([0.5, 0.0])          # gradient (0.3, 0)
    assert o.query_dp(x, np.array([1.0, 0.0])) == 1
    assert o.query_dp(x, np.array([-1.0, 0.0])) == -1
    # tie (orthogonal direction) resolves to +1
    assert o.query_dp(x, np.array([0.0, 1.0])) == 1
    assert o.query_count == 3


def test_comparator_signs(problem):
    o = OracleHandle(problem=problem, kind="comparator")
    lo = np.array([0.2, 0.0])
    hi = np.array([0.8, 0.0])
    assert o.query_comparator(hi, lo) == -1   # f(hi) >= f(lo)
    assert o.query_comparator(lo, hi) == 1
    # equal values report -1 (the tie counts as "not smaller")
    assert o.query_comparator(lo, lo) == -1
    assert o.query_count == 3


def test_value_exact(problem):
    o = OracleHandle(problem=problem, kind="value")
    assert o.query_value(np.array([0.2, 0.0])) == 0.0
    assert o.query_value(np.array([0.7, 0.0])) == pytest.approx(0.125)
    assert o.query_count == 2


def test_noisy_value_seeded_and_centered(problem):
    o1 = OracleHandle(problem=problem, kind="noisy_value", sigma=0.3, seed=42)
    o2 = OracleHandle(problem=problem, kind="noisy_value", sigma=0.3, seed=42)
    x = np.array([0.5, 0.1])
    v1 = [o1.query_noisy_value(x) for _ in range(5)]
    v2 = [o2.query_noisy_value(x) for _ in range(5)]
    assert v1 == v2              # identical seeds, identical streams
    o3 = OracleHandle(problem=problem, kind="noisy_value", sigma=0.3, seed=43)
    assert [o3.query_noisy_value(x) for _ in range(5)] != v1
    # empirical mean approaches f(x), std approaches sigma
    big = OracleHandle(problem=problem, kind="noisy_value", sigma=0.3, seed=1)
    vals = big.query_noisy_value_batch(x, 20000)
    assert np.mean(vals) == pytest.approx(problem.objective(x), abs=0.01)
    assert np.std(vals) == pytest.approx(0.3, abs=0.01)
    assert big.query_count == 20000


def test_sigma_zero_is_exact(problem):
    o = OracleHandle(problem=problem, kind="noisy_value", sigma=0.0, seed=0)
    x = np.array([0.4, 0.0])
    assert o.query_noisy_value(x) == problem.objective(x)


def test_budget_semantics(problem):
    o = OracleHandle(problem=problem, kind="value", budget=3)
    x = np.array([0.0, 0.0])
    for _ in range(3):
        o.query_value(x)
    with pytest.raises(BudgetExhaustedError):
        o.query_value(x)
    assert o.query_count == 3     # counter unchanged by the failed query
    assert o.remaining == 0


def test_batch_budget_checked_before_spending(problem):
    o = OracleHandle(problem=problem, kind="noisy_value", sigma=0.1, seed=0,
                     budget=10)
    x = np.array([0.0, 0.0])
    o.query_noisy_value_batch(x, 6)
    with pytest.raises(BudgetExhaustedError):
        o.query_noisy_value_batch(x, 5)
    assert o.query_count == 6
    o.query_noisy_value_batch(x, 4)
    assert o.query_count == 10


def test_infeasible_queries_raise_hard(problem):
    outside = np.array([1.5, 0.0])
    inside = np.array([0.0, 0.0])
    o = OracleHandle(problem=problem, kind="dp")
    with pytest.raises(InfeasibleQueryError):
        o.query_dp(outside, np.array([1.0, 0.0]))
    assert o.query_count == 0
    oc = OracleHandle(problem=problem, kind="comparator")
    with pytest.raises(InfeasibleQueryError):
        oc.query_comparator(inside, outside)
    ov = OracleHandle(problem=problem, kind="value")
    with pytest.raises(InfeasibleQueryError):
        ov.query_value(outside)


def test_kind_mismatch_rejected(problem):
    o = OracleHandle(problem=problem, kind="dp")
    with pytest.raises(ValueError):
        o.query_value(np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        OracleHandle(problem=problem, kind="mystery")


def test_batch_matches_sequential_stream(problem):
    x = np.array([0.1, 0.1])
    o1 = OracleHandle(problem=problem, kind="noisy_value", sigma=1.0, seed=5)
    o2 = OracleHandle(problem=problem, kind="noisy_value", sigma=1.0, seed=5)
    batch = o2.query_noisy_value_batch(x, 8)
    seq = np.array([o1.query_noisy_value(x) for _ in range(8)])
    np.testing.assert_allclose(batch, seq)
