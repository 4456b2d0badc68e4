"""szo: derivative-free convex optimization from sub-zeroth-order oracles.

Cutting-scheme solvers driven by directional-preference, comparator, exact
value, and noisy value oracles, with verified accuracy/regret bounds and a
benchmark CLI (`szo`).
"""

from .errors import (BudgetExhaustedError, ConfigurationError,
                     DegenerateEllipsoidError, InfeasibleQueryError, SzoError)
from .geometry import (Cone, Ellipsoid, IsotropicTransform, cone_shrink_ratio,
                       halfspace_cut, isotropic, orthonormal_completion,
                       prune_cone, shallow_cut, shallow_cut_volume_ratio)
from .oracles import OracleHandle
from .problems import (Domain, ProblemInstance, ball, box, default_suite,
                       from_config, initial_ellipsoid, make_logsumexp,
                       make_quadratic, make_smoothed_norm)
from .pruning import (PruneResult, bisection_tournament,
                      finite_difference_sign, prune_direction_comparator,
                      prune_direction_dp)
from .regret import (RegretConfig, RegretTrace, minimize_regret, regret_bound,
                     regret_cut_count, rescale_to_unit_smoothness)
from .solvers import (SolverConfig, comparator_cut_count,
                      comparator_probe_scale,
                      comparator_query_bound, dp_cut_count, dp_query_bound,
                      optimize_comparator, optimize_dp, optimize_value,
                      value_query_bound)
from .trace import CSV_COLUMNS, IterationRecord, RunTrace

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
