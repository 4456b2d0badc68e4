"""Sub-zeroth-order oracles with query counting, budgets, and feasibility.

Four oracle kinds over a ProblemInstance:

* directional preference: sign of <grad f(x), y>  (-1 iff strictly negative)
* comparator: -1 iff f(x) >= f(y), else +1
* value: exact f(x)
* noisy value: f(x) + N(0, sigma^2), seeded and reproducible

Every call counts one query against the (optional) budget.  Queries at
infeasible points raise InfeasibleQueryError; they are never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhaustedError, InfeasibleQueryError

DP = "dp"
COMPARATOR = "comparator"
VALUE = "value"
NOISY_VALUE = "noisy_value"

_KINDS = (DP, COMPARATOR, VALUE, NOISY_VALUE)


@dataclass
class OracleHandle:
    problem: object
    kind: str
    sigma: float = 0.0
    seed: int = 0
    budget: int = None
    query_count: int = 0
    _rng: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown oracle kind: {self.kind!r}")
        if self.kind == NOISY_VALUE:
            if self.sigma < 0.0:
                raise ValueError("sigma must be nonnegative")
            self._rng = np.random.default_rng(self.seed)
        # single-point memoization: solvers query the same center many times
        # per iteration; caching derived data does not affect query counting
        self._grad_key = None
        self._grad_val = None
        self._feas_keys = {}
        self._value_cache = {}

    @property
    def remaining(self):
        if self.budget is None:
            return None
        return self.budget - self.query_count

    def _spend(self, count=1):
        if self.budget is not None and self.query_count + count > self.budget:
            raise BudgetExhaustedError(
                f"query budget of {self.budget} exhausted "
                f"(used {self.query_count}, requested {count})"
            )
        self.query_count += count

    def _require_feasible(self, x):
        key = x.tobytes() if isinstance(x, np.ndarray) else None
        if key is not None and key in self._feas_keys:
            return
        if not self.problem.domain.contains(x):
            raise InfeasibleQueryError(
                f"query at infeasible point (norm offset from domain center "
                f"{np.linalg.norm(np.asarray(x) - self.problem.domain.center):.6g})"
            )
        if key is not None:
            if len(self._feas_keys) > 8:
                self._feas_keys.clear()
            self._feas_keys[key] = True

    def _gradient(self, x):
        key = x.tobytes() if isinstance(x, np.ndarray) else None
        if key is not None and key == self._grad_key:
            return self._grad_val
        g = self.problem.gradient(np.asarray(x, dtype=float))
        if key is not None:
            self._grad_key, self._grad_val = key, g
        return g

    def _value(self, x):
        key = x.tobytes() if isinstance(x, np.ndarray) else None
        if key is not None and key in self._value_cache:
            return self._value_cache[key]
        f = float(self.problem.objective(np.asarray(x, dtype=float)))
        if key is not None:
            if len(self._value_cache) > 16:
                self._value_cache.clear()
            self._value_cache[key] = f
        return f

    def _require_kind(self, kind):
        if self.kind != kind:
            raise ValueError(f"oracle kind is {self.kind!r}, not {kind!r}")

    def query_dp(self, x, y):
        """Directional preference: -1 iff <grad f(x), y> < 0, else +1."""
        self._require_kind(DP)
        self._require_feasible(x)
        self._spend()
        g = self._gradient(x)
        return -1 if float(g @ np.asarray(y, dtype=float)) < 0.0 else 1

    def query_comparator(self, x, y):
        """-1 iff f(x) >= f(y), else +1.  Counts a single query."""
        self._require_kind(COMPARATOR)
        self._require_feasible(x)
        self._require_feasible(y)
        self._spend()
        return -1 if self._value(x) >= self._value(y) else 1

    def query_value(self, x):
        self._require_kind(VALUE)
        self._require_feasible(x)
        self._spend()
        return float(self.problem.objective(np.asarray(x, dtype=float)))

    def query_noisy_value(self, x):
        self._require_kind(NOISY_VALUE)
        self._require_feasible(x)
        self._spend()
        f = float(self.problem.objective(np.asarray(x, dtype=float)))
        return f + self.sigma * float(self._rng.standard_normal())

    def query_noisy_value_batch(self, x, count):
        """`count` independent noisy evaluations at a single point.

        Counts `count` queries.  Raises before drawing when the batch would
        exceed the budget, leaving the counter unchanged.
        """
        self._require_kind(NOISY_VALUE)
        if count < 1:
            raise ValueError("batch size must be at least 1")
        self._require_feasible(x)
        self._spend(count)
        f = float(self.problem.objective(np.asarray(x, dtype=float)))
        return f + self.sigma * self._rng.standard_normal(count)


def for_solver(problem, solver, sigma=0.0, seed=0, budget=None):
    """Oracle handle matching a solver name ('dp', 'comparator', 'value',
    'regret-nv')."""
    kind = {"dp": DP, "comparator": COMPARATOR, "value": VALUE,
            "regret-nv": NOISY_VALUE}.get(solver)
    if kind is None:
        raise ValueError(f"unknown solver: {solver!r}")
    return OracleHandle(problem=problem, kind=kind, sigma=sigma, seed=seed,
                        budget=budget)
