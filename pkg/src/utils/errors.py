"""
Error types raised across the library.

@help.category Utilities
@help.title Errors
@help.description Exception hierarchy rooted at ResolvabilityError. Input validation errors
also subclass ValueError so callers may catch either.
"""
from typing import Any, Optional, Sequence


class ResolvabilityError(Exception):
    """Base class for library errors."""


class DomainViolationError(ResolvabilityError, ValueError):
    """A parameter or observation lies outside the family's domain."""

    def __init__(self, coordinate: int, value: float, bounds: Sequence[float], what: str = "theta"):
        self.coordinate = coordinate
        self.value = value
        self.bounds = tuple(bounds)
        super().__init__(
            f"{what}[{coordinate}] = {value!r} outside domain [{self.bounds[0]}, {self.bounds[1]}]"
        )


class PreconditionError(ResolvabilityError, ValueError):
    """A lemma or theorem hypothesis does not hold for the supplied inputs."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        message = f"hypothesis violated: {hypothesis}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class QuadratureError(ResolvabilityError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, value: float, error_estimate: float, tolerance: float):
        self.value = value
        self.error_estimate = error_estimate
        self.tolerance = tolerance
        super().__init__(
            f"quadrature error estimate {error_estimate:.3e} exceeds tolerance {tolerance:.3e} "
            f"(value {value!r})"
        )


class LatticeCapError(ResolvabilityError, RuntimeError):
    """Grid enumeration would exceed the configured point cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"grid has {count} points, cap is {cap}")


class EigenvalueError(ResolvabilityError, RuntimeError):
    """Eigenvalue extremum over a mesh is not usable."""

    def __init__(self, message: str, location: Optional[Sequence[float]] = None, value: Optional[float] = None):
        self.location = None if location is None else tuple(float(x) for x in location)
        self.value = value
        super().__init__(f"{message}; mesh location={self.location}, eigenvalue={value}")


class SymmetryError(ResolvabilityError, RuntimeError):
    """Finite-difference Hessian is not symmetric within tolerance."""

    def __init__(self, asymmetry: float, tolerance: float):
        self.asymmetry = asymmetry
        self.tolerance = tolerance
        super().__init__(f"Hessian asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")


class BudgetExceededError(ResolvabilityError, RuntimeError):
    """A run exceeded its wall-clock budget; carries whatever finished."""

    def __init__(self, seconds: float, partial: Any = None):
        self.seconds = seconds
        self.partial = partial
        super().__init__(f"runtime budget of {seconds}s exceeded")
