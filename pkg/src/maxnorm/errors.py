"""Exception types shared across the package."""


class MaxNormError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MaxNormError, ValueError):
    """Malformed data: negative entries, broken metric, non-monotone weights, ..."""


class InvalidSolutionError(MaxNormError, ValueError):
    """A solution object violates hard constraints of its instance."""


class InfeasibleError(MaxNormError):
    """The instance (or an LP / flow subproblem) admits no feasible solution."""


class ResourceCapError(MaxNormError):
    """An enumeration or iteration cap was exceeded.  Caps fail loudly, never truncate."""


class LpSolverError(MaxNormError):
    """Numeric failure inside an LP solve; carries solver diagnostics."""


class SolverInternalError(MaxNormError):
    """A contract the algorithm relies on was violated (should never happen)."""
