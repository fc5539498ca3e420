"""
Discretized penalized maximum likelihood.

@help.category Estimator
@help.title Penalized MLE
@help.description theta_hat = argmin over the grid of -sum_i log p_theta(x_i) + L(theta). Ties go
to the lexicographically smallest lattice index. Also computes Kraft-like sums
sum exp(-(L + pseudo)/2) in log space.
@help.performance Exponential families reduce each sample to compensated sums of the
sufficient statistic, so scoring the whole grid costs one matrix-vector product.
"""
import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import logsumexp

from src.estimator.penalty import AdaptivePenalty, Penalty, PseudoPenalty, TablePenalty
from src.grid.lattice import EpsGrid
from src.models.base import DataSample, ParametricFamily
from src.utils.errors import ResolvabilityError

logger = logging.getLogger(__name__)

KRAFT_TOLERANCE = 1e-12


class KraftSum(NamedTuple):
    value: float
    log_value: float
    twice_kraft_ok: bool


class Estimate(NamedTuple):
    theta: np.ndarray
    position: int
    objective: float


class AdaptiveEstimate(NamedTuple):
    model: int
    theta: np.ndarray
    objective: float


def kraft_sum(grid: EpsGrid, penalty: Penalty, pseudo_penalty: Optional[PseudoPenalty] = None) -> KraftSum:
    """
    sum over the grid of exp(-(L + pseudo)/2).

    @help.title Kraft Sum
    @help.description twice_kraft_ok is set when the sum is at most 1 (up to 1e-12 rounding).
    @help.example
        kraft_sum(grid, ZeroPenalty()).value  # grid size
    """
    points = grid.enumerate_points()
    exponent = penalty.evaluate(points)
    if pseudo_penalty is not None:
        exponent = exponent + pseudo_penalty.evaluate(points)
    return kraft_from_exponents(exponent)


def kraft_from_exponents(exponent: np.ndarray) -> KraftSum:
    log_value = float(logsumexp(-0.5 * np.asarray(exponent, dtype=float)))
    value = math.exp(log_value) if log_value < 709.0 else math.inf
    ok = math.isfinite(log_value) and log_value <= math.log1p(KRAFT_TOLERANCE)
    return KraftSum(value, log_value, ok)


def equivalent_penalty(grid: EpsGrid, penalty: Penalty) -> TablePenalty:
    """L + 2 log z with z the Kraft sum; same minimizer, Kraft sum exactly one."""
    points = grid.enumerate_points()
    values = penalty.evaluate(points)
    log_z = kraft_from_exponents(values).log_value
    return TablePenalty(grid, values + 2.0 * log_z)


class PenalizedMLE:
    """
    Penalized MLE over a fixed (family, grid, penalty).

    @help.title Penalized MLE Class
    @help.description Enumerates the grid and its penalty once; fit() can then be called for
    many samples, concurrently if desired (the object is read-only after construction).
    """

    def __init__(self, family: ParametricFamily, grid: EpsGrid, penalty: Penalty):
        if grid.dim != family.dim:
            raise ValueError(f"grid dimension {grid.dim} does not match family dimension {family.dim}")
        self.family = family
        self.grid = grid
        self.penalty = penalty
        self.points = grid.enumerate_points()
        if self.points.shape[0] == 0:
            raise ValueError("grid is empty")
        for theta in (self.points[0], self.points[-1]):
            family.check_parameter(theta)
        self.penalty_values = penalty.evaluate(self.points)

    def objectives(self, data: DataSample) -> np.ndarray:
        if data.dim != self.family.dim:
            raise ValueError("sample dimension does not match family dimension")
        return self.family.negative_log_likelihood(self.points, data) + self.penalty_values

    def fit(self, data: DataSample) -> Estimate:
        objective = self.objectives(data)
        finite = np.isfinite(objective)
        if not np.any(finite):
            raise ResolvabilityError("log-likelihood is not finite at any grid point")
        # argmin returns the first minimum, i.e. the smallest lattice index
        position = int(np.argmin(np.where(finite, objective, np.inf)))
        return Estimate(self.points[position].copy(), position, float(objective[position]))


def penalized_mle(family: ParametricFamily, grid: EpsGrid, penalty: Penalty, data: DataSample) -> np.ndarray:
    """
    Grid point minimizing -log-likelihood + penalty.

    @help.title Penalized MLE Function
    @help.example
        penalized_mle(GaussianLocation(1), grid, ZeroPenalty(), sample)
    """
    return PenalizedMLE(family, grid, penalty).fit(data).theta


def penalized_mle_adaptive(family: ParametricFamily, penalty: AdaptivePenalty, data: DataSample) -> AdaptiveEstimate:
    """
    (k_hat, theta_hat) minimizing -log-likelihood + L0(k) + L_k(theta) over all models.

    Ties go to the smaller model index, then to the smaller lattice index.
    """
    if not penalty.per_model:
        raise ValueError("adaptive penalty has no per-model penalties")
    best: Optional[AdaptiveEstimate] = None
    for k, (grid, model_penalty) in enumerate(penalty.per_model, start=1):
        estimate = PenalizedMLE(family, grid, model_penalty).fit(data)
        objective = estimate.objective + float(penalty.l0[k - 1])
        if best is None or objective < best.objective:
            best = AdaptiveEstimate(k, estimate.theta, objective)
    logger.debug("adaptive estimate: model %d, objective %.6g", best.model, best.objective)
    return best
