"""Exception and warning types shared across the package."""

from __future__ import annotations


class AnglatError(Exception):
    """Base class for numerical failures raised by this package."""


class PoleError(AnglatError, ValueError):
    """The argument sits on a pole of the function being evaluated."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class DomainError(AnglatError, ValueError):
    """Argument outside the domain where the routine is defined."""


class ConvergenceError(AnglatError):
    """A truncation or quadrature failed its own stability test."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class UnsupportedSumError(AnglatError, ValueError):
    """A lattice sum specification has no stored reduction to the generators."""


class BranchPointError(AnglatError, ValueError):
    """A phase was requested at a zero of the rational phase factor."""


class DegenerateError(AnglatError):
    """A geometric quantity (tangent, stationary point) is undefined."""


class InsufficientDataError(AnglatError, ValueError):
    """Too few samples for a statistic."""


class AmbiguousLabelError(AnglatError):
    """Zeros of two different factors coincide to within the labelling tolerance."""


class NearPoleWarning(UserWarning):
    """Evaluation close to a pole; the value is returned but may be inaccurate."""


class BranchCutWarning(UserWarning):
    """Evaluation close to the branch cut of a principal square root."""


class MissedZeroWarning(UserWarning):
    """A scan found fewer zeros than the smooth counting function predicts."""
