"""Exception hierarchy for bulkedge operations."""


class BulkEdgeError(Exception):
    """Base class for all package errors."""


class GapClosed(BulkEdgeError):
    """The requested energy sits inside (or too close to) the spectrum."""


class NotAProjection(BulkEdgeError):
    """Operator fails the idempotency residual required of a projection."""


class DimensionMismatch(BulkEdgeError):
    """Operators or gauges defined on incompatible index sets."""


class QuadratureUnresolved(BulkEdgeError):
    """Contour quadrature did not stabilise under grid refinement."""


class ConditionUnsatisfied(BulkEdgeError):
    """A precondition of an estimate (not the estimate itself) fails."""


class InsufficientRange(BulkEdgeError):
    """Window too small to support the requested fit or bin count."""


class InsufficientGrid(BulkEdgeError):
    """Parameter grid too small for the requested scaling fit."""


class AssumptionsViolated(BulkEdgeError):
    """Standing-assumption audit of a projection pair failed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DifferentP(BulkEdgeError):
    """Invariance comparison requires both pairs to share the same P."""


class ConfigInvalid(BulkEdgeError):
    """Experiment configuration failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class IoFailure(BulkEdgeError):
    """Record emission could not write its output."""
