"""Exception types shared across the package."""


class IncompatError(Exception):
    """Base class for all package errors."""


class OutOfRangeError(IncompatError, ValueError):
    """An argument lies outside its documented domain."""


class VectorTooLongError(OutOfRangeError):
    """Bloch vector norm exceeds 1 beyond tolerance."""


class InfeasibleError(IncompatError, ValueError):
    """Requested shift parameters violate the POVM positivity constraint."""


class IncompatibleError(IncompatError, ValueError):
    """Joint-observable synthesis requested for an incompatible pair."""


class NoRootError(IncompatError, ValueError):
    """Boundary root requested where the quadratic has no positive root."""


class DomainError(IncompatError, ValueError):
    """A radicand fell below zero beyond tolerance."""


class NotBracketedError(IncompatError, ValueError):
    """Bisection endpoints do not bracket a predicate flip."""


class SolverFailureError(IncompatError, RuntimeError):
    """The minimizer failed to produce any feasible point (internal bug)."""


class NonFiniteError(IncompatError, ArithmeticError):
    """Objective returned a non-finite value at a feasible point."""


class ShapeMismatchError(IncompatError, ValueError):
    """Behavior/strategy index sets do not line up."""


class ParseError(IncompatError, ValueError):
    """Malformed CLI value (vector, angle, or state-set literal)."""


class BudgetExceededError(IncompatError, RuntimeError):
    """Search budget exhausted; .partial carries results gathered so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
