"""Exception types shared across the package.

Everything user-facing derives from MinkbillError so the CLI can map bad
input to a single exit code.
"""


class MinkbillError(ValueError):
    """Base class for all package errors."""


class BodyError(MinkbillError):
    """Malformed, empty-interior, or unbounded convex body."""


class DimensionMismatch(MinkbillError):
    """Operands live in different ambient dimensions."""


class GaugeError(MinkbillError):
    """Unit ball unusable as a gauge (origin not interior, etc.)."""


class LPError(MinkbillError):
    """Linear program could not be solved to optimality."""


class FieldError(MinkbillError):
    """Scalar field rejected (bad coefficients, gradient check failed)."""


class StallError(MinkbillError):
    """Ascent flow stalled at a critical point."""


class InputError(MinkbillError):
    """Bad file content or CLI parameters."""
