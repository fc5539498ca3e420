"""Unit tests for the discretized penalized MLE."""
import math

import numpy as np
import pytest

from src.estimator.adaptive import (
    CLASS_KRAFT_BOUND,
    adaptive_penalty_from_models,
    build_adaptive_penalty,
)
from src.estimator.mle import (
    PenalizedMLE,
    equivalent_penalty,
    kraft_from_exponents,
    kraft_sum,
    penalized_mle,
    penalized_mle_adaptive,
)
from src.estimator.penalty import CodelengthPenalty, ConstantPenalty, SquaredNormPenalty, ZeroPenalty
from src.grid.lattice import EpsGrid
from src.models.base import Box, DataSample
from src.models.exponential import GaussianLocation
from src.models.location import LaplaceLocation
from src.utils.errors import DomainViolationError


class TestPenalizedMLE:
    """Test the penalized MLE over a grid."""

    def test_gaussian_rounds_sample_mean(self, gaussian, unit_grid):
        """Test that the Gaussian estimate is the grid point nearest the mean."""
        data = DataSample.external([0.31, 0.29, 0.36, 0.24])
        np.testing.assert_allclose(penalized_mle(gaussian, unit_grid, ZeroPenalty(), data), [0.3])

    def test_laplace_tracks_median(self, laplace, unit_grid):
        """Test that the Laplace estimate sits at the sample median."""
        data = DataSample.external([-0.9, 0.4, 0.5, 0.7, 0.9])
        np.testing.assert_allclose(penalized_mle(laplace, unit_grid, ZeroPenalty(), data), [0.5])

    def test_ties_go_to_smallest_index(self, gaussian):
        """Test that equal objectives resolve to the smaller lattice index."""
        grid = EpsGrid.create(0.0, 1.0, Box.cube(1, -2.0, 2.0))
        data = DataSample.external([0.5])
        np.testing.assert_allclose(penalized_mle(gaussian, grid, ZeroPenalty(), data), [0.0])

    def test_penalty_shifts_estimate(self, gaussian):
        """Test that a squared-norm penalty pulls the estimate toward zero."""
        grid = EpsGrid.create(0.0, 0.5, Box.cube(1, -3.0, 3.0))
        data = DataSample.external([2.0])
        plain = penalized_mle(gaussian, grid, ZeroPenalty(), data)
        shrunk = penalized_mle(gaussian, grid, SquaredNormPenalty(), data)
        assert plain[0] == pytest.approx(2.0)
        assert abs(shrunk[0]) < abs(plain[0])

    def test_constant_penalty_does_not_move(self, gaussian, unit_grid):
        """Test that a constant penalty leaves the minimizer unchanged."""
        data = gaussian.sample([0.2], 30, seed=9)
        a = penalized_mle(gaussian, unit_grid, ZeroPenalty(), data)
        b = penalized_mle(gaussian, unit_grid, ConstantPenalty(7.0), data)
        np.testing.assert_array_equal(a, b)

    def test_fit_reports_position(self, gaussian, unit_grid):
        """Test that fit returns the enumeration position and objective."""
        estimator = PenalizedMLE(gaussian, unit_grid, ZeroPenalty())
        estimate = estimator.fit(DataSample.external([0.0]))
        assert estimate.position == 10
        assert estimate.objective == pytest.approx(0.918939, abs=1e-6)

    def test_dimension_mismatch(self, unit_grid):
        """Test that the grid must match the family dimension."""
        with pytest.raises(ValueError, match="does not match"):
            PenalizedMLE(GaussianLocation(2), unit_grid, ZeroPenalty())

    def test_bernoulli_grid_outside_domain(self, bernoulli):
        """Test that Bernoulli observations outside {0, 1} are rejected at fit time."""
        grid = EpsGrid.create(0.0, 0.5, Box.cube(1, -1.0, 1.0))
        estimator = PenalizedMLE(bernoulli, grid, ZeroPenalty())
        with pytest.raises(DomainViolationError):
            estimator.fit(DataSample.external([0.5]))

    def test_reproducible_for_fixed_seed(self, gaussian, unit_grid):
        """Test that the estimate is a pure function of the sample."""
        data = gaussian.sample([0.0], 25, seed=3)
        assert penalized_mle(gaussian, unit_grid, ZeroPenalty(), data)[0] == \
            penalized_mle(gaussian, unit_grid, ZeroPenalty(), gaussian.sample([0.0], 25, seed=3))[0]


class TestKraftSum:
    """Test Kraft-like sums."""

    def test_zero_penalty_counts_points(self, unit_grid):
        """Test that a zero penalty sums to the grid size."""
        total = kraft_sum(unit_grid, ZeroPenalty())
        assert total.value == pytest.approx(21.0)
        assert not total.twice_kraft_ok

    def test_log_space(self):
        """Test that huge exponents stay finite in log space."""
        total = kraft_from_exponents(np.array([-3000.0, -3000.0]))
        assert math.isinf(total.value)
        assert total.log_value == pytest.approx(1500.0 + math.log(2.0))

    def test_equivalent_penalty(self, gaussian, unit_grid):
        """Test that L + 2 log z keeps the minimizer and has Kraft sum one."""
        table = equivalent_penalty(unit_grid, ZeroPenalty())
        assert kraft_sum(unit_grid, table).value == pytest.approx(1.0, abs=1e-12)
        data = gaussian.sample([0.1], 15, seed=2)
        np.testing.assert_array_equal(
            penalized_mle(gaussian, unit_grid, table, data),
            penalized_mle(gaussian, unit_grid, ZeroPenalty(), data),
        )


class TestAdaptivePenalty:
    """Test adaptive penalties across models."""

    def test_single_model_l0(self):
        """Test L0(1) = sqrt(2) + 2 log 5."""
        penalty = build_adaptive_penalty([5.0])
        assert penalty.l0[0] == pytest.approx(4.6334, abs=1e-4)

    def test_class_sum_bound(self):
        """Test that S_k = 1 for many models sums below 0.9727."""
        penalty = build_adaptive_penalty([1.0] * 50)
        assert CLASS_KRAFT_BOUND == pytest.approx(0.9727, abs=1e-4)
        assert penalty.class_kraft_sum <= CLASS_KRAFT_BOUND
        assert penalty.twice_kraft_ok

    def test_rejects_invalid_sums(self):
        """Test that S_k must be finite and positive."""
        with pytest.raises(ValueError):
            build_adaptive_penalty([])
        with pytest.raises(ValueError, match="S_2"):
            build_adaptive_penalty([1.0, 0.0])

    def test_from_models(self, unit_grid):
        """Test computing S_k from (grid, penalty) pairs."""
        coarse = EpsGrid.create(0.0, 0.5, Box.cube(1, -1.0, 1.0))
        penalty = adaptive_penalty_from_models([(coarse, ZeroPenalty()), (unit_grid, ZeroPenalty())])
        assert penalty.model_count == 2
        assert penalty.l0[1] == pytest.approx(2.0 * math.sqrt(2.0) + 2.0 * math.log(21.0))
        assert penalty.value(1, [0.5]) == pytest.approx(penalty.l0[0])

    def test_adaptive_estimate(self, gaussian, unit_grid):
        """Test that the adaptive MLE picks a model and a grid point."""
        coarse = EpsGrid.create(0.0, 0.5, Box.cube(1, -1.0, 1.0))
        penalty = adaptive_penalty_from_models([
            (coarse, CodelengthPenalty.uniform(coarse)),
            (unit_grid, CodelengthPenalty.uniform(unit_grid)),
        ])
        data = gaussian.sample([0.5], 40, seed=12)
        estimate = penalized_mle_adaptive(gaussian, penalty, data)
        assert estimate.model in (1, 2)
        grid = coarse if estimate.model == 1 else unit_grid
        assert grid.contains(estimate.theta)

    def test_adaptive_needs_models(self, gaussian):
        """Test that an L0-only penalty cannot be fitted."""
        with pytest.raises(ValueError, match="no per-model penalties"):
            penalized_mle_adaptive(gaussian, build_adaptive_penalty([1.0]), DataSample.external([0.0]))
