"""Exception types raised across the package."""


class PartialL1Error(Exception):
    """Base class for all package errors."""


class DomainError(PartialL1Error, ValueError):
    """Arguments fall outside the region where a quantity is defined."""


class NonConvergence(PartialL1Error, ArithmeticError):
    """A quadrature or root finder did not reach the requested accuracy."""

    def __init__(self, message, estimate=None, abs_error=None):
        super().__init__(message)
        self.estimate = estimate
        self.abs_error = abs_error


class BracketError(PartialL1Error, ArithmeticError):
    """A bracketing search found no sign change between its endpoints."""

    def __init__(self, message, endpoints=None, values=None):
        super().__init__(message)
        self.endpoints = endpoints
        self.values = values


class EmptyRun(PartialL1Error, ValueError):
    """A simulation was asked to run zero trials."""


class RankDeficient(PartialL1Error, ArithmeticError):
    """The measurement matrix does not have full row rank."""


class SolverAnomaly(PartialL1Error, RuntimeError):
    """The LP solver reported an outcome that should not occur (infeasible, unbounded, ...)."""
