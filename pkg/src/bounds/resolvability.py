"""
Index of resolvability.

@help.category Bounds
@help.title Index of Resolvability
@help.description R = inf over the grid of D(P || P_theta) + L(theta)/n, by enumeration, and a
Taylor-type upper bound at any point of the grid's convex hull that replaces the enumeration
with the curvature of the cross-information plus penalty over a ball of radius eps sqrt(d).
@help.example
    resolvability_index(GaussianLocation(1), grid, ZeroPenalty(), ModelMember(family, [0.05]), 100)
"""
import logging
import math
from typing import NamedTuple, Optional, Union

import numpy as np

from src.estimator.penalty import Penalty
from src.grid.lattice import EpsGrid
from src.models.base import ModelMember, ParametricFamily, TrueDistribution
from src.models.exponential import ExponentialFamily
from src.utils.errors import DomainViolationError, PreconditionError
from src.utils.numerics import box_mesh

logger = logging.getLogger(__name__)


class ResolvabilityIndex(NamedTuple):
    value: float
    minimizer: Optional[np.ndarray]
    kl: float


def as_truth(family: ParametricFamily, truth: Union[TrueDistribution, np.ndarray, list]) -> TrueDistribution:
    """A parameter vector stands for the family member it indexes."""
    if isinstance(truth, TrueDistribution):
        return truth
    return ModelMember(family, truth)


def resolvability_index(
    family: ParametricFamily,
    grid: EpsGrid,
    penalty: Penalty,
    truth,
    n: int,
) -> ResolvabilityIndex:
    """
    inf over grid points of D(P || P_theta) + L(theta)/n, with its minimizer.

    An infinite KL at every grid point gives value +inf and no minimizer.
    """
    if n < 1:
        raise ValueError("sample size n must be >= 1")
    truth = as_truth(family, truth)
    points = grid.enumerate_points()
    kl = np.asarray(truth.kl_to(family, points), dtype=float)
    objective = kl + penalty.evaluate(points) / n
    finite = np.isfinite(objective)
    if not np.any(finite):
        logger.warning("resolvability index is infinite: KL to P is infinite at all %d grid points", points.shape[0])
        return ResolvabilityIndex(math.inf, None, math.inf)
    position = int(np.argmin(np.where(finite, objective, np.inf)))
    return ResolvabilityIndex(float(objective[position]), points[position].copy(), float(kl[position]))


def resolvability_taylor_bound(
    family: ParametricFamily,
    truth,
    theta,
    penalty: Penalty,
    eps: float,
    n: int,
    grid: Optional[EpsGrid] = None,
) -> float:
    """
    D(P || P_theta) + L(theta)/n + (eps^2 d / 2) sup over B(theta, eps sqrt d) of lambda_max(I_P + Hess L / n)_+.

    @help.title Resolvability Taylor Bound
    @help.description Upper-bounds the enumerated index whenever theta lies in the convex hull of
    the grid. The supremum is taken over a mesh of the enclosing cube, which contains the ball.
    Needs an exponential family (I_P is then the Hessian of psi) and a penalty with a Hessian.
    """
    if not family.twice_differentiable or not isinstance(family, ExponentialFamily):
        raise PreconditionError("p_theta twice continuously differentiable in theta", family.name)
    if eps <= 0.0 or n < 1:
        raise ValueError("eps must be positive and n >= 1")
    theta = family.check_parameter(theta)
    if grid is not None:
        hull = grid.hull()
        j = hull.first_violation(theta)
        if j is not None:
            raise DomainViolationError(j, float(theta[j]), (hull.lower[j], hull.upper[j]), what="theta (grid hull)")
    if penalty.hessian(theta) is None:
        raise PreconditionError("twice-differentiable penalty", repr(penalty))

    truth = as_truth(family, truth)
    d = family.dim
    radius = eps * math.sqrt(d)
    natural = family.natural_domain
    lower = np.maximum(theta - radius, natural.lower_array())
    upper = np.minimum(theta + radius, natural.upper_array())
    mesh = box_mesh(lower, upper)
    curvature = family.log_partition_hessian(mesh)
    curvature = curvature + np.stack([penalty.hessian(p) for p in mesh]) / n
    largest = float(np.max(np.linalg.eigvalsh(curvature)[:, -1]))

    kl = float(truth.kl_to(family, theta[None, :])[0])
    value = kl + penalty.value(theta) / n + 0.5 * eps * eps * d * max(largest, 0.0)
    logger.debug("taylor bound at %s: kl=%.6g, sup eigenvalue=%.6g", theta.tolist(), kl, largest)
    return value
