"""
Exponential families.

@help.category Models
@help.title Exponential Families
@help.description Families with density r(x) exp(theta . phi(x) - psi(theta)). Hellinger affinity
has the closed form exp(-[(psi(a) + psi(b))/2 - psi((a + b)/2)]) and relative entropy is the
Bregman divergence of psi. Built in: unit-variance Gaussian location (d = 1, 2, 3) and the
Bernoulli natural-parameter family.
@help.use_case Closed-form divergences for the certificates; quadrature is only an oracle here.
"""
import math
from abc import abstractmethod
from typing import Sequence, Tuple

import numpy as np
from scipy import special

from src.models.base import Box, DataSample, LocationFamily, ParametricFamily
from src.models.quadrature import QuadratureResult, discrete_affinity
from src.utils.errors import DomainViolationError, PreconditionError
from src.utils.numerics import eigen_extrema_on_mesh, fsum, fsum_columns

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class ExponentialFamily(ParametricFamily):
    """
    Natural-parameter exponential family.

    @help.title Exponential Family Class
    @help.description Subclasses supply the sufficient statistic phi, log-partition psi with
    its gradient and Hessian, and the carrier log r. The log-partition methods accept a
    batch of parameters of shape (..., d).
    """

    # True when the Hessian of psi does not depend on theta.
    constant_hessian: bool = False

    @abstractmethod
    def sufficient_statistic(self, points: np.ndarray) -> np.ndarray:
        """phi(x) for rows of ``points``, shape (n, d)."""

    @abstractmethod
    def log_partition(self, thetas: np.ndarray) -> np.ndarray:
        """psi over the last axis."""

    @abstractmethod
    def log_partition_gradient(self, theta: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def log_partition_hessian(self, thetas: np.ndarray) -> np.ndarray:
        """Hessian of psi for a batch (m, d) -> (m, d, d)."""

    @abstractmethod
    def carrier_log(self, points: np.ndarray) -> np.ndarray:
        ...

    def _log_density(self, theta: np.ndarray, points: np.ndarray) -> np.ndarray:
        return self.carrier_log(points) + self.sufficient_statistic(points) @ theta - float(self.log_partition(theta))

    def negative_log_likelihood(self, thetas: np.ndarray, data: DataSample) -> np.ndarray:
        """Uses compensated sums of the sufficient statistics, so n only enters once."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        self.check_support(data.points)
        stat_totals = fsum_columns(self.sufficient_statistic(data.points))
        carrier_total = fsum(self.carrier_log(data.points))
        return -(carrier_total + thetas @ stat_totals - data.n * self.log_partition(thetas))

    # ------------------------------------------------------------- divergences

    def jensen_gap(self, theta_a: np.ndarray, theta_b: np.ndarray) -> np.ndarray:
        """(psi(a) + psi(b))/2 - psi((a + b)/2), broadcasting over rows of theta_b."""
        gap = 0.5 * (self.log_partition(theta_a) + self.log_partition(theta_b)) - self.log_partition(
            0.5 * (theta_a + theta_b)
        )
        return np.maximum(gap, 0.0)

    def hellinger_affinity(self, theta_a, theta_b) -> float:
        a = self.check_parameter(theta_a)
        b = self.check_parameter(theta_b)
        if np.array_equal(a, b):
            return 1.0
        return float(np.exp(-self.jensen_gap(a, b)))

    def kl_divergence(self, theta_a, theta_b) -> float:
        a = self.check_parameter(theta_a)
        b = self.check_parameter(theta_b)
        if np.array_equal(a, b):
            return 0.0
        return float(self._bregman(a, b[None, :])[0])

    def _bregman(self, a: np.ndarray, points: np.ndarray) -> np.ndarray:
        value = self.log_partition(points) - float(self.log_partition(a)) - (points - a) @ self.log_partition_gradient(a)
        return np.maximum(value, 0.0)

    def affinity_to_points(self, theta_a, points: np.ndarray) -> np.ndarray:
        a = self.check_parameter(theta_a)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.exp(-self.jensen_gap(a, points))
        values[np.all(points == a, axis=1)] = 1.0
        return values

    def kl_to_points(self, theta_a, points: np.ndarray) -> np.ndarray:
        a = self.check_parameter(theta_a)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = self._bregman(a, points)
        values[np.all(points == a, axis=1)] = 0.0
        return values

    # ------------------------------------------------------------- curvature

    def hessian_eigen_extrema(self, domain: Box) -> Tuple[float, float]:
        """
        (inf lambda_min, sup lambda_max) of the Hessian of psi over ``domain``.

        Bounded domains are scanned on a mesh; unbounded ones are only accepted when the
        Hessian is constant.
        """
        if domain.dim != self.dim:
            raise ValueError(f"domain dimension {domain.dim} does not match family dimension {self.dim}")
        natural = self.natural_domain
        for j in range(self.dim):
            if domain.lower[j] < natural.lower[j] or domain.upper[j] > natural.upper[j]:
                bad = domain.lower[j] if domain.lower[j] < natural.lower[j] else domain.upper[j]
                raise DomainViolationError(j, bad, (natural.lower[j], natural.upper[j]))
        if self.constant_hessian:
            eigs = np.linalg.eigvalsh(self.log_partition_hessian(np.zeros((1, self.dim)))[0])
            return float(eigs[0]), float(eigs[-1])
        if not domain.bounded:
            raise PreconditionError(
                "bounded parameter domain", f"{self.name} has non-constant curvature; pass a bounded box"
            )
        smallest, _, largest, _ = eigen_extrema_on_mesh(
            self.log_partition_hessian, domain.lower_array(), domain.upper_array()
        )
        return smallest, largest


class GaussianLocation(ExponentialFamily, LocationFamily):
    """
    Unit-variance Gaussian location family N(theta, I_d).

    @help.title Gaussian Location Family
    @help.description psi(theta) = ||theta||^2 / 2, so A = exp(-||a - b||^2 / 8) and
    D = ||a - b||^2 / 2 exactly.
    @help.example
        family = GaussianLocation(dim=1)
        family.hellinger_affinity([0.0], [2.0])  # 0.606531
    """

    name = "gaussian"
    is_product = True
    constant_hessian = True
    integration_halfwidth = 12.0

    def __init__(self, dim: int = 1):
        if dim not in (1, 2, 3):
            raise ValueError("gaussian location family supports d in {1, 2, 3}")
        super().__init__(dim)

    def sufficient_statistic(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float)

    def log_partition(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        return 0.5 * np.sum(thetas * thetas, axis=-1)

    def log_partition_gradient(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).copy()

    def log_partition_hessian(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        return np.broadcast_to(np.eye(self.dim), (thetas.shape[0], self.dim, self.dim)).copy()

    def carrier_log(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return -0.5 * np.sum(points * points, axis=1) - self.dim * _LOG_SQRT_2PI

    def jensen_gap(self, theta_a: np.ndarray, theta_b: np.ndarray) -> np.ndarray:
        diff = np.asarray(theta_b, dtype=float) - np.asarray(theta_a, dtype=float)
        return np.sum(diff * diff, axis=-1) / 8.0

    def _bregman(self, a: np.ndarray, points: np.ndarray) -> np.ndarray:
        diff = points - a
        return 0.5 * np.sum(diff * diff, axis=1)

    def _draw(self, theta: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        return theta + rng.standard_normal((n, self.dim))

    # Per-axis pieces for the quadrature oracles.
    def marginal_log_density(self, t: float, x: float) -> float:
        z = x - t
        return -0.5 * z * z - _LOG_SQRT_2PI

    def marginal_affinity(self, a: float, b: float) -> float:
        return math.exp(-((a - b) ** 2) / 8.0)

    def marginal_kl(self, a: float, b: float) -> float:
        return 0.5 * (a - b) ** 2

    def kink_points(self, a: float, b: float) -> Sequence[float]:
        return (a, 0.5 * (a + b), b)

    @property
    def first_central_moment(self) -> float:
        """E||Z|| for Z ~ N(0, I_d): sqrt(2) Gamma((d+1)/2) / Gamma(d/2)."""
        d = self.dim
        return math.sqrt(2.0) * math.exp(special.gammaln((d + 1) / 2.0) - special.gammaln(d / 2.0))

    def marginal_cdf(self, x: float) -> float:
        return float(special.ndtr(x))

    def marginal_density(self, x: float) -> float:
        return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


class BernoulliNatural(ExponentialFamily):
    """
    Bernoulli family in its natural parameter: p = e^theta / (1 + e^theta).

    @help.title Bernoulli Natural-Parameter Family
    @help.description psi(theta) = log(1 + e^theta), Hessian p(1 - p). Observations are 0 or 1.
    """

    name = "bernoulli"

    def __init__(self, dim: int = 1):
        if dim != 1:
            raise ValueError("bernoulli family supports d = 1 only")
        super().__init__(dim)

    def check_support(self, points: np.ndarray) -> None:
        bad = np.argwhere((points != 0.0) & (points != 1.0))
        if bad.size:
            row, col = bad[0]
            raise DomainViolationError(int(col), float(points[row, col]), (0.0, 1.0), what="x")

    def sufficient_statistic(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float)

    def log_partition(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        return np.logaddexp(0.0, thetas[..., 0])

    def log_partition_gradient(self, theta: np.ndarray) -> np.ndarray:
        return special.expit(np.asarray(theta, dtype=float))

    def log_partition_hessian(self, thetas: np.ndarray) -> np.ndarray:
        p = special.expit(np.atleast_2d(thetas)[:, 0])
        return (p * (1.0 - p))[:, None, None]

    def carrier_log(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(points).shape[0])

    def _draw(self, theta: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        p = float(special.expit(theta[0]))
        return (rng.random((n, 1)) < p).astype(float)

    def _support_log_pmf(self, theta: np.ndarray) -> np.ndarray:
        return self._log_density(theta, np.array([[0.0], [1.0]]))

    def numeric_affinity(self, theta_a, theta_b, tol=None) -> QuadratureResult:
        """Sum over the two-point support."""
        a = self.check_parameter(theta_a)
        b = self.check_parameter(theta_b)
        return QuadratureResult(discrete_affinity(self._support_log_pmf(a), self._support_log_pmf(b)), 0.0)

    def numeric_kl(self, theta_a, theta_b, tol=None) -> QuadratureResult:
        la = self._support_log_pmf(self.check_parameter(theta_a))
        lb = self._support_log_pmf(self.check_parameter(theta_b))
        return QuadratureResult(math.fsum((np.exp(la) * (la - lb)).tolist()), 0.0)

    def numeric_normalization(self, theta, tol=None) -> float:
        return math.fsum(np.exp(self._support_log_pmf(self.check_parameter(theta))).tolist())
