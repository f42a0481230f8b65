"""Shared exception types."""


class DimensionError(ValueError):
    """Operator dimensions are wrong or mismatched."""


class BudgetError(RuntimeError):
    """An enumeration or sampling budget was exhausted before completion."""


class NonConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap without converging."""


class InfeasibleError(RuntimeError):
    """A semidefinite program was detected to be infeasible."""
