"""
Parametric family interface.

@help.category Models
@help.title Parametric Family Interface
@help.description Abstract base class and data models for the built-in parametric families.
Defines the contract every family (exponential or location) implements: densities,
sampling, Hellinger affinity and relative entropy between members.
"""
import math
from abc import ABC, abstractmethod
from functools import partial
from typing import Callable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.models.quadrature import (
    QuadratureResult,
    integration_range,
    quadrature_affinity,
    quadrature_kl,
    quadrature_moment,
)
from src.utils.errors import DomainViolationError, PreconditionError


class Box(BaseModel):
    """
    Axis-aligned box in R^d; infinite bounds allowed.

    @help.title Box Model
    @help.description Lower and upper corner of an axis-aligned box, used both for natural
    parameter domains and for grid bounding boxes.
    @help.example
        box = Box(lower=(-1.0,), upper=(1.0,))
    """

    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...]
    # @help.description Lower corner, one entry per coordinate (may be -inf)
    upper: Tuple[float, ...]
    # @help.description Upper corner, one entry per coordinate (may be +inf)

    @model_validator(mode="after")
    def _check_corners(self) -> "Box":
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box corners must have equal, positive dimension")
        for j, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo > hi:
                raise ValueError(f"box lower[{j}]={lo} exceeds upper[{j}]={hi}")
        return self

    @classmethod
    def cube(cls, d: int, lo: float, hi: float) -> "Box":
        return cls(lower=(float(lo),) * d, upper=(float(hi),) * d)

    @classmethod
    def unbounded(cls, d: int) -> "Box":
        return cls.cube(d, -np.inf, np.inf)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    def contains(self, theta: np.ndarray, tol: float = 0.0) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.lower_array() - tol) and np.all(theta <= self.upper_array() + tol))

    def first_violation(self, theta: np.ndarray) -> Optional[int]:
        theta = np.asarray(theta, dtype=float)
        bad = np.flatnonzero((theta < self.lower_array()) | (theta > self.upper_array()) | ~np.isfinite(theta))
        return int(bad[0]) if bad.size else None


class DataSample(BaseModel):
    """
    An iid sample X^n.

    @help.title Data Sample Model
    @help.description n points in R^d together with the seed that produced them,
    or "external" for samples loaded from disk.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    # @help.description Array of shape (n, d)
    n: int
    seed: Union[int, Literal["external"]]
    # @help.description RNG seed (64-bit integer) or "external"

    @field_validator("points", mode="before")
    @classmethod
    def _as_2d(cls, value):
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        return arr

    @model_validator(mode="after")
    def _check_shape(self) -> "DataSample":
        if self.n < 1:
            raise ValueError("sample size n must be >= 1")
        if self.points.shape[0] != self.n:
            raise ValueError(f"points has {self.points.shape[0]} rows, n={self.n}")
        return self

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @classmethod
    def external(cls, points: Sequence) -> "DataSample":
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        return cls(points=arr, n=arr.shape[0], seed="external")


class ParametricFamily(ABC):
    """
    Abstract base class for parametric families {P_theta}.

    @help.title Parametric Family Class
    @help.description Subclasses implement log densities, sampling and the two divergences
    used by the estimator and the certificates. Families are immutable and safe to share
    across threads.
    @help.example
        family = GaussianLocation(dim=1)
        family.log_density(np.zeros(1), np.zeros(1))  # -0.918939
    """

    name: str = "family"
    # Product families factor over coordinates: A multiplies and KL adds per axis.
    is_product: bool = False
    # Half-width of the per-axis quadrature range around each centre.
    integration_halfwidth: float = 12.0

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    @property
    def natural_domain(self) -> Box:
        return Box.unbounded(self.dim)

    # ------------------------------------------------------------------ checks

    def check_parameter(self, theta) -> np.ndarray:
        """Coerce theta to a float vector and reject values outside the domain."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.dim,):
            raise ValueError(f"{self.name}: theta must have dimension {self.dim}, got shape {theta.shape}")
        coordinate = self.natural_domain.first_violation(theta)
        if coordinate is not None:
            domain = self.natural_domain
            raise DomainViolationError(
                coordinate, float(theta[coordinate]), (domain.lower[coordinate], domain.upper[coordinate])
            )
        return theta

    def check_support(self, points: np.ndarray) -> None:
        """Reject observations outside the support (default: finite reals)."""
        bad = np.argwhere(~np.isfinite(points))
        if bad.size:
            row, col = bad[0]
            raise DomainViolationError(int(col), float(points[row, col]), (-np.inf, np.inf), what="x")

    def _as_points(self, x) -> Tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim == 1:
            if arr.size == self.dim:
                return arr.reshape(1, self.dim), True
            if self.dim == 1:
                return arr.reshape(-1, 1), False
        elif arr.ndim == 2 and arr.shape[1] == self.dim:
            return arr, False
        raise ValueError(f"{self.name}: observations must have dimension {self.dim}")

    # --------------------------------------------------------------- densities

    @abstractmethod
    def _log_density(self, theta: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Vectorized log p_theta over rows of ``points``."""

    def log_density(self, theta, x):
        """log p_theta(x) for one observation (float) or rows of an (n, d) array."""
        theta = self.check_parameter(theta)
        points, single = self._as_points(x)
        self.check_support(points)
        values = self._log_density(theta, points)
        return float(values[0]) if single else values

    def negative_log_likelihood(self, thetas: np.ndarray, data: DataSample) -> np.ndarray:
        """-sum_i log p_theta(x_i) for each row of ``thetas``."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        self.check_support(data.points)
        return np.array([-np.sum(self._log_density(theta, data.points)) for theta in thetas])

    # ---------------------------------------------------------------- sampling

    @abstractmethod
    def _draw(self, theta: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw an (n, d) iid sample."""

    def sample(self, theta, n: int, seed: int) -> DataSample:
        """
        Draw n iid observations from P_theta.

        @help.title Sample
        @help.description Deterministic given (family, theta, n, seed).
        """
        if n < 1:
            raise ValueError("sample size n must be >= 1")
        theta = self.check_parameter(theta)
        rng = np.random.default_rng(seed)
        return DataSample(points=self._draw(theta, int(n), rng), n=int(n), seed=int(seed))

    # ------------------------------------------------------------- divergences

    @abstractmethod
    def hellinger_affinity(self, theta_a, theta_b) -> float:
        """A(P_a, P_b) = integral of sqrt(p_a p_b)."""

    @abstractmethod
    def kl_divergence(self, theta_a, theta_b) -> float:
        """D(P_a || P_b)."""

    def affinity_to_points(self, theta_a, points: np.ndarray) -> np.ndarray:
        theta_a = self.check_parameter(theta_a)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_product:
            return self._per_axis(theta_a, points, self.marginal_affinity, np.prod)
        return np.array([self.hellinger_affinity(theta_a, p) for p in points])

    def kl_to_points(self, theta_a, points: np.ndarray) -> np.ndarray:
        theta_a = self.check_parameter(theta_a)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_product:
            return self._per_axis(theta_a, points, self.marginal_kl, np.sum)
        return np.array([self.kl_divergence(theta_a, p) for p in points])

    def _per_axis(self, theta_a: np.ndarray, points: np.ndarray, marginal, combine) -> np.ndarray:
        columns = []
        for j in range(self.dim):
            values, inverse = np.unique(points[:, j], return_inverse=True)
            table = np.array([marginal(float(theta_a[j]), float(v)) for v in values])
            columns.append(table[inverse.ravel()])
        return combine(np.column_stack(columns), axis=1)

    # Product families override these with one-dimensional divergences.
    def marginal_affinity(self, a: float, b: float) -> float:
        raise NotImplementedError(f"{self.name} is not a product family")

    def marginal_kl(self, a: float, b: float) -> float:
        raise NotImplementedError(f"{self.name} is not a product family")

    def marginal_log_density(self, t: float, x: float) -> float:
        raise NotImplementedError(f"{self.name} is not a product family")

    def kink_points(self, a: float, b: float) -> Sequence[float]:
        """Breakpoints for the per-axis quadrature of members a and b."""
        return (a, b)

    # ----------------------------------------------------------------- oracles

    def _per_axis_quadrature(self, theta_a, theta_b, rule, combine, tol=None) -> QuadratureResult:
        a = self.check_parameter(theta_a)
        b = self.check_parameter(theta_b)
        values, errors = [], []
        for j in range(self.dim):
            lower, upper = integration_range((a[j], b[j]), self.integration_halfwidth)
            result = rule(
                partial(self.marginal_log_density, float(a[j])),
                partial(self.marginal_log_density, float(b[j])),
                lower,
                upper,
                points=self.kink_points(float(a[j]), float(b[j])),
                tol=tol,
            )
            values.append(result.value)
            errors.append(result.error)
        return QuadratureResult(combine(values), math.fsum(errors))

    def numeric_affinity(self, theta_a, theta_b, tol: Optional[float] = None) -> QuadratureResult:
        """Quadrature oracle for A; product families multiply per-axis integrals."""
        return self._per_axis_quadrature(theta_a, theta_b, quadrature_affinity, math.prod, tol)

    def numeric_kl(self, theta_a, theta_b, tol: Optional[float] = None) -> QuadratureResult:
        """Quadrature oracle for D(P_a || P_b); per-axis divergences add."""
        return self._per_axis_quadrature(theta_a, theta_b, quadrature_kl, math.fsum, tol)

    def numeric_normalization(self, theta, tol: Optional[float] = None) -> float:
        """Integral of p_theta, used to check that densities integrate to one."""
        theta = self.check_parameter(theta)
        total = 1.0
        for j in range(self.dim):
            t = float(theta[j])
            lower, upper = integration_range((t,), self.integration_halfwidth)
            total *= quadrature_moment(
                partial(self.marginal_log_density, t), lambda x: 1.0, lower, upper, points=(t,), tol=tol
            ).value
        return total

    # ---------------------------------------------------------- differentiability

    @property
    def twice_differentiable(self) -> bool:
        return True


class LocationFamily(ABC):
    """
    Location family p_theta(x) = p_0(x - theta).

    @help.title Location Family Interface
    @help.description Location families expose the first central moment s = E||X - theta||,
    the marginal median offset v of the theta = 0 member, and marginal cdf/density
    used by the median-based affinity bounds.
    """

    @property
    @abstractmethod
    def first_central_moment(self) -> float:
        """s = E||X - theta|| (independent of theta)."""

    @property
    def median_offset(self) -> np.ndarray:
        return np.zeros(self.dim)  # type: ignore[attr-defined]

    def marginal_median(self, theta) -> np.ndarray:
        return np.asarray(theta, dtype=float) + self.median_offset

    @abstractmethod
    def marginal_cdf(self, x: float) -> float:
        """CDF of one coordinate of the theta = 0 member."""

    @abstractmethod
    def marginal_density(self, x: float) -> float:
        """Density of one coordinate of the theta = 0 member."""


class TrueDistribution(ABC):
    """
    Data-generating distribution P.

    @help.title True Distribution
    @help.description Either a member of a built-in family or an external distribution that
    supplies its own sampler and divergence oracles.
    """

    dim: int

    @abstractmethod
    def sample(self, n: int, seed: int) -> DataSample:
        ...

    @abstractmethod
    def log_density(self, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def affinity_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        """A(P, P_theta) for each grid point."""

    @abstractmethod
    def kl_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        """D(P || P_theta) for each grid point."""


class ModelMember(TrueDistribution):
    """P = P_theta* for a built-in family."""

    def __init__(self, family: ParametricFamily, theta):
        self.family = family
        self.theta = family.check_parameter(theta)
        self.dim = family.dim

    def __repr__(self) -> str:
        return f"ModelMember({self.family!r}, theta={self.theta.tolist()})"

    def sample(self, n: int, seed: int) -> DataSample:
        return self.family.sample(self.theta, n, seed)

    def log_density(self, points: np.ndarray) -> np.ndarray:
        return self.family.log_density(self.theta, np.atleast_2d(points))

    def affinity_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        if family is not self.family and type(family) is not type(self.family):
            raise ValueError("model member affinities require the same family")
        return family.affinity_to_points(self.theta, points)

    def kl_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        if family is not self.family and type(family) is not type(self.family):
            raise ValueError("model member divergences require the same family")
        return family.kl_to_points(self.theta, points)


class ExternalDistribution(TrueDistribution):
    """
    Caller-supplied P.

    ``sampler(n, rng)`` returns an (n, d) array; ``affinity(theta)`` and ``kl(theta)``
    are oracles for A(P, P_theta) and D(P || P_theta).
    """

    def __init__(
        self,
        dim: int,
        sampler: Callable[[int, np.random.Generator], np.ndarray],
        log_density: Callable[[np.ndarray], np.ndarray],
        affinity: Callable[[np.ndarray], float],
        kl: Optional[Callable[[np.ndarray], float]] = None,
    ):
        self.dim = dim
        self._sampler = sampler
        self._log_density = log_density
        self._affinity = affinity
        self._kl = kl

    def sample(self, n: int, seed: int) -> DataSample:
        if n < 1:
            raise ValueError("sample size n must be >= 1")
        points = np.asarray(self._sampler(n, np.random.default_rng(seed)), dtype=float).reshape(n, self.dim)
        return DataSample(points=points, n=n, seed=seed)

    def log_density(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self._log_density(np.atleast_2d(points)), dtype=float)

    def affinity_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        return np.array([self._affinity(p) for p in np.atleast_2d(points)], dtype=float)

    def kl_to(self, family: ParametricFamily, points: np.ndarray) -> np.ndarray:
        if self._kl is None:
            raise PreconditionError("P supplies a KL oracle", "external distribution without kl")
        return np.array([self._kl(p) for p in np.atleast_2d(points)], dtype=float)
