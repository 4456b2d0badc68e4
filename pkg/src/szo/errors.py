"""Exception types shared across the library."""


class SzoError(Exception):
    """Base class for library errors."""


class DegenerateEllipsoidError(SzoError):
    """The ellipsoid lost positive-definiteness or became too ill-conditioned."""


class InfeasibleQueryError(SzoError):
    """An oracle was queried at a point outside the feasible domain."""


class BudgetExhaustedError(SzoError):
    """The oracle query budget was exhausted."""


class ConfigurationError(SzoError):
    """An experiment configuration is invalid."""
