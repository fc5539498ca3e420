"""Unit tests for the index of resolvability."""
import math

import numpy as np
import pytest

from src.bounds.resolvability import as_truth, resolvability_index, resolvability_taylor_bound
from src.estimator.penalty import CodelengthPenalty, SquaredNormPenalty, ZeroPenalty
from src.models.base import ExternalDistribution, ModelMember
from src.models.exponential import GaussianLocation
from src.utils.errors import DomainViolationError, PreconditionError


class TestResolvabilityIndex:
    """Test the enumerated index."""

    def test_gaussian_nearest_point(self, gaussian, unit_grid):
        """Test R = (theta* - nearest)^2 / 2 with a zero penalty."""
        result = resolvability_index(gaussian, unit_grid, ZeroPenalty(), [0.03], 100)
        assert result.value == pytest.approx(0.03**2 / 2, rel=1e-10)
        np.testing.assert_allclose(result.minimizer, [0.0])
        assert result.kl == pytest.approx(result.value)

    def test_on_grid_truth_is_zero(self, gaussian, unit_grid):
        """Test that an on-grid theta* gives R = 0."""
        result = resolvability_index(gaussian, unit_grid, ZeroPenalty(), [0.3], 100)
        assert result.value == pytest.approx(0.0, abs=1e-15)

    def test_penalty_enters_over_n(self, gaussian, unit_grid):
        """Test R = min KL + L/n."""
        penalty = CodelengthPenalty.uniform(unit_grid)
        result = resolvability_index(gaussian, unit_grid, penalty, [0.3], 50)
        assert result.value == pytest.approx(2.0 * math.log(21) / 50, rel=1e-10)

    def test_penalty_moves_minimizer(self, gaussian, unit_grid):
        """Test that a squared-norm penalty trades KL against L/n."""
        result = resolvability_index(gaussian, unit_grid, SquaredNormPenalty(), [1.0], 1)
        assert result.minimizer[0] == pytest.approx(0.3)

    def test_infinite_kl_everywhere(self, gaussian, unit_grid):
        """Test that an infinite KL at every point gives +inf and no minimizer."""
        truth = ExternalDistribution(
            dim=1,
            sampler=lambda n, rng: rng.standard_cauchy(n),
            log_density=lambda points: np.zeros(points.shape[0]),
            affinity=lambda theta: 0.5,
            kl=lambda theta: math.inf,
        )
        result = resolvability_index(gaussian, unit_grid, ZeroPenalty(), truth, 100)
        assert math.isinf(result.value)
        assert result.minimizer is None

    def test_rejects_zero_n(self, gaussian, unit_grid):
        """Test that n must be positive."""
        with pytest.raises(ValueError):
            resolvability_index(gaussian, unit_grid, ZeroPenalty(), [0.0], 0)

    def test_as_truth(self, gaussian):
        """Test that parameter vectors stand for family members."""
        assert isinstance(as_truth(gaussian, [0.0]), ModelMember)
        member = ModelMember(gaussian, [0.0])
        assert as_truth(gaussian, member) is member


class TestTaylorBound:
    """Test the curvature upper bound."""

    def test_dominates_index(self, gaussian, unit_grid):
        """Test that the Taylor bound is at least the enumerated index."""
        index = resolvability_index(gaussian, unit_grid, ZeroPenalty(), [0.03], 100).value
        bound = resolvability_taylor_bound(gaussian, [0.03], [0.03], ZeroPenalty(), 0.1, 100, grid=unit_grid)
        assert bound == pytest.approx(0.5 * 0.01, rel=1e-10)
        assert bound >= index

    def test_with_squared_norm(self):
        """Test the penalty Hessian entering the curvature."""
        family = GaussianLocation(2)
        bound = resolvability_taylor_bound(family, [0.0, 0.0], [0.0, 0.0], SquaredNormPenalty(), 0.1, 10)
        # lambda_max(I + 2I/10) = 1.2, d = 2
        assert bound == pytest.approx(0.5 * 0.01 * 2 * 1.2, rel=1e-10)

    def test_needs_smooth_family(self, laplace):
        """Test that the Laplace family is refused."""
        with pytest.raises(PreconditionError):
            resolvability_taylor_bound(laplace, [0.0], [0.0], ZeroPenalty(), 0.1, 100)

    def test_theta_outside_hull(self, gaussian, unit_grid):
        """Test that theta must lie in the convex hull of the grid."""
        with pytest.raises(DomainViolationError):
            resolvability_taylor_bound(gaussian, [0.0], [1.5], ZeroPenalty(), 0.1, 100, grid=unit_grid)

    def test_needs_penalty_hessian(self, gaussian, unit_grid):
        """Test that a tabulated penalty without a Hessian is refused."""
        penalty = CodelengthPenalty.uniform(unit_grid)
        with pytest.raises(PreconditionError, match="twice-differentiable penalty"):
            resolvability_taylor_bound(gaussian, [0.0], [0.0], penalty, 0.1, 100)
