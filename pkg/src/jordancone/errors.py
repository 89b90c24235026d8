"""Exception types raised by the analysis pipeline."""

from __future__ import annotations


class JordanConeError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(JordanConeError, ValueError):
    pass


class ZeroMap(JordanConeError, ValueError):
    pass


class InsufficientTruncation(JordanConeError):
    def __init__(self, needed: int, available: int, what: str = "curve"):
        self.needed = needed
        self.available = available
        super().__init__(
            f"{what} carries coefficients through order {available}, "
            f"but order {needed} is required to determine the result"
        )


class InconsistentK(JordanConeError):
    pass


class ShiftOrderViolation(JordanConeError):
    def __init__(self, order: int, required: int, magnitude: float):
        self.order = order
        self.required = required
        self.magnitude = magnitude
        super().__init__(
            f"blown-up map has a nonzero term at epsilon order {order} "
            f"below the required order {required} (size {magnitude:.3g})"
        )


class NewtonDivergence(JordanConeError):
    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Newton iteration stalled at residual {residual:.3e} after {iterations} steps"
        )


class SingularJacobian(JordanConeError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"Jacobian is numerically singular (condition estimate {condition:.3e})")


class ContinuationBreakdown(JordanConeError):
    def __init__(self, eps: float, last_good=None):
        self.eps = eps
        self.last_good = last_good
        super().__init__(f"continuation failed at eps = {eps:.6g}")


class OutOfCone(JordanConeError):
    def __init__(self, norm: float, radius: float):
        self.norm = norm
        self.radius = radius
        super().__init__(f"level coordinate norm {norm:.3g} exceeds cone radius {radius:.3g}")


class DegenerateThroughT(JordanConeError):
    pass


class NonPositive(JordanConeError):
    def __init__(self, value: int):
        self.value = value
        super().__init__(f"Milnor formula produced a non-positive value {value}")


class Undefined(JordanConeError):
    pass


class Unsupported(JordanConeError):
    pass
