"""
Divergences between family members.

@help.category Models
@help.title Divergences
@help.description Functional entry points for the Hellinger affinity A, Bhattacharyya
divergence D_B = 2 log(1/A), squared Hellinger distance D_H = 2(1 - A), relative entropy,
the Gaussian decay constant of an exponential family and the Fisher cross-information.
@help.example
    from src.models import GaussianLocation
    from src.models.divergences import bhattacharyya
    bhattacharyya(GaussianLocation(1), [0.0], [2.0])  # 1.0
"""
import logging
import math
from typing import Optional

import numpy as np

from src.models.base import Box, ParametricFamily, TrueDistribution
from src.models.exponential import ExponentialFamily
from src.utils.errors import EigenvalueError, PreconditionError
from src.utils.numerics import central_hessian, fsum

logger = logging.getLogger(__name__)


def hellinger_affinity(family: ParametricFamily, theta_a, theta_b) -> float:
    """A(P_a, P_b) in (0, 1]."""
    return family.hellinger_affinity(theta_a, theta_b)


def bhattacharyya(family: ParametricFamily, theta_a, theta_b) -> float:
    """D_B = 2 log(1/A)."""
    affinity = family.hellinger_affinity(theta_a, theta_b)
    if affinity >= 1.0:
        return 0.0
    return -2.0 * math.log(affinity)


def bhattacharyya_from_affinity(affinity: np.ndarray) -> np.ndarray:
    affinity = np.asarray(affinity, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(affinity >= 1.0, 0.0, -2.0 * np.log(affinity))


def squared_hellinger(family: ParametricFamily, theta_a, theta_b) -> float:
    """D_H = 2(1 - A), the squared Hellinger distance."""
    return 2.0 * (1.0 - family.hellinger_affinity(theta_a, theta_b))


def kl_divergence(family: ParametricFamily, theta_a, theta_b) -> float:
    """D(P_a || P_b)."""
    return family.kl_divergence(theta_a, theta_b)


def gaussian_decay_constant(family: ParametricFamily, domain: Box) -> float:
    """
    c = (1/8) inf over ``domain`` of the smallest eigenvalue of Cov(phi).

    @help.title Gaussian Decay Constant
    @help.description Guarantees A(P_a, P_b) <= exp(-c ||a - b||^2) for a, b in the domain.
    Requires an exponential family and, unless its curvature is constant, a bounded domain.
    @help.example
        gaussian_decay_constant(GaussianLocation(1), Box.unbounded(1))  # 0.125
    """
    if not isinstance(family, ExponentialFamily):
        raise PreconditionError("exponential family", f"{family.name} has no log-partition function")
    smallest, _ = family.hessian_eigen_extrema(domain)
    if not math.isfinite(smallest) or smallest <= 0.0:
        raise EigenvalueError("smallest eigenvalue of Cov(phi) is not positive on the domain", value=smallest)
    c = smallest / 8.0
    logger.debug("gaussian decay constant for %s on %s: %.6g", family.name, domain, c)
    return c


def kl_net_beta(family: ParametricFamily, domain: Box) -> float:
    """
    beta with D(P_theta || P_nearest) <= beta eps^2 for every theta in the domain.

    Rounding moves each coordinate by at most eps/2, so beta = d sup lambda_max / 8.
    """
    if not isinstance(family, ExponentialFamily):
        raise PreconditionError("exponential family", f"{family.name} has no log-partition function")
    _, largest = family.hessian_eigen_extrema(domain)
    return family.dim * largest / 8.0


def fisher_cross_information(
    truth: TrueDistribution,
    family: ParametricFamily,
    theta,
    method: str = "closed",
    n_samples: int = 2000,
    seed: int = 0,
    symmetry_tol: float = 1e-8,
) -> np.ndarray:
    """
    I_P(theta) = E_P Hessian of log(1/p_theta(X)).

    ``method="closed"`` returns the Hessian of psi (exponential families, independent of P);
    ``method="finite-difference"`` differentiates the empirical risk on a sample from P.
    """
    if not family.twice_differentiable:
        raise PreconditionError("p_theta twice continuously differentiable in theta", family.name)
    theta = family.check_parameter(theta)
    if method == "closed":
        if not isinstance(family, ExponentialFamily):
            raise PreconditionError("exponential family for the closed form", family.name)
        return family.log_partition_hessian(theta[None, :])[0]
    if method != "finite-difference":
        raise ValueError(f"Unsupported method: {method}")

    data = truth.sample(n_samples, seed)

    def empirical_risk(t: np.ndarray) -> float:
        return -fsum(family._log_density(t, data.points)) / data.n

    return central_hessian(empirical_risk, theta, symmetry_tol=symmetry_tol)


def ordering_chain_holds(family: ParametricFamily, theta_a, theta_b, tol: float = 1e-12) -> bool:
    """D_H <= D_B <= D for one pair."""
    d_h = squared_hellinger(family, theta_a, theta_b)
    d_b = bhattacharyya(family, theta_a, theta_b)
    kl = kl_divergence(family, theta_a, theta_b)
    return d_h <= d_b + tol and d_b <= kl + tol
