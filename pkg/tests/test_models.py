"""Unit tests for parametric families and divergences."""
import math

import numpy as np
import pytest

from src.models.base import Box, DataSample, ExternalDistribution, ModelMember
from src.models.divergences import (
    bhattacharyya,
    fisher_cross_information,
    gaussian_decay_constant,
    kl_divergence,
    kl_net_beta,
    ordering_chain_holds,
    squared_hellinger,
)
from src.models.exponential import BernoulliNatural, GaussianLocation
from src.models.location import LaplaceLocation
from src.models.quadrature import quadrature_affinity
from src.models.registry import get_family
from src.utils.errors import DomainViolationError, PreconditionError, QuadratureError


class TestBox:
    """Test parameter boxes."""

    def test_cube(self):
        """Test building a cube."""
        box = Box.cube(2, -1.0, 1.0)
        assert box.dim == 2
        assert box.bounded
        assert box.contains(np.array([0.5, -1.0]))
        assert not box.contains(np.array([1.5, 0.0]))

    def test_unbounded(self):
        """Test that an unbounded box contains every finite point."""
        box = Box.unbounded(1)
        assert not box.bounded
        assert box.contains(np.array([1e300]))

    def test_first_violation(self):
        """Test locating the first coordinate outside the box."""
        box = Box.cube(3, 0.0, 1.0)
        assert box.first_violation(np.array([0.5, 2.0, -1.0])) == 1
        assert box.first_violation(np.array([0.5, 0.5, 0.5])) is None

    def test_rejects_inverted_corners(self):
        """Test that lower > upper is rejected."""
        with pytest.raises(ValueError):
            Box(lower=(1.0,), upper=(0.0,))


class TestDataSample:
    """Test data samples."""

    def test_external_sample(self):
        """Test wrapping observations loaded from disk."""
        data = DataSample.external([0.1, 0.2, 0.3])
        assert data.n == 3
        assert data.dim == 1
        assert data.seed == "external"

    def test_rejects_mismatched_size(self):
        """Test that n must match the number of rows."""
        with pytest.raises(ValueError):
            DataSample(points=np.zeros((3, 1)), n=2, seed=0)


class TestLogDensity:
    """Test log densities of the built-in families."""

    def test_gaussian_at_mean(self, gaussian):
        """Test the Gaussian log density at its mean."""
        assert gaussian.log_density([0.0], 0.0) == pytest.approx(-0.918939, abs=1e-6)

    def test_laplace_one_unit_away(self, laplace):
        """Test the Laplace log density one unit from its centre."""
        assert laplace.log_density([0.0], 1.0) == pytest.approx(-1.693147, abs=1e-6)

    def test_vectorized_rows(self, gaussian):
        """Test evaluation over rows of an (n, d) array."""
        values = gaussian.log_density([0.0], np.array([[0.0], [1.0]]))
        assert values.shape == (2,)
        assert values[1] == pytest.approx(-0.918939 - 0.5, abs=1e-6)

    def test_bernoulli_rejects_non_binary(self, bernoulli):
        """Test that Bernoulli observations must be 0 or 1."""
        with pytest.raises(DomainViolationError):
            bernoulli.log_density([0.0], 0.5)

    def test_wrong_dimension(self):
        """Test that theta must match the family dimension."""
        with pytest.raises(ValueError, match="dimension"):
            GaussianLocation(2).log_density([0.0], [0.0, 0.0])

    def test_densities_integrate_to_one(self, gaussian, laplace):
        """Test the quadrature normalization oracle."""
        assert gaussian.numeric_normalization([0.3]) == pytest.approx(1.0, abs=1e-8)
        assert laplace.numeric_normalization([-0.7]) == pytest.approx(1.0, abs=1e-8)
        assert BernoulliNatural(1).numeric_normalization([0.4]) == pytest.approx(1.0, abs=1e-12)


class TestSampling:
    """Test sampling."""

    def test_deterministic_given_seed(self, gaussian):
        """Test that (theta, n, seed) fixes the sample."""
        a = gaussian.sample([0.0], 20, seed=11)
        b = gaussian.sample([0.0], 20, seed=11)
        np.testing.assert_array_equal(a.points, b.points)
        assert a.seed == 11

    def test_different_seeds_differ(self, gaussian):
        """Test that different seeds give different samples."""
        a = gaussian.sample([0.0], 20, seed=1)
        b = gaussian.sample([0.0], 20, seed=2)
        assert not np.array_equal(a.points, b.points)

    def test_bernoulli_support(self, bernoulli):
        """Test that Bernoulli draws are 0 or 1."""
        data = bernoulli.sample([0.2], 200, seed=5)
        assert set(np.unique(data.points)) <= {0.0, 1.0}

    def test_rejects_empty_sample(self, gaussian):
        """Test that n must be at least one."""
        with pytest.raises(ValueError):
            gaussian.sample([0.0], 0, seed=1)


class TestDivergences:
    """Test affinities and divergences."""

    def test_gaussian_affinity_closed_form(self, gaussian):
        """Test A = exp(-(a - b)^2 / 8) for the unit Gaussian."""
        assert gaussian.hellinger_affinity([0.0], [2.0]) == pytest.approx(0.606531, abs=1e-6)

    def test_gaussian_affinity_matches_quadrature(self, gaussian):
        """Test the closed form against the quadrature oracle."""
        numeric = gaussian.numeric_affinity([0.0], [2.0])
        assert numeric.value == pytest.approx(0.606531, abs=1e-6)
        assert numeric.value == pytest.approx(gaussian.hellinger_affinity([0.0], [2.0]), abs=1e-8)

    def test_bernoulli_affinity_matches_support_sum(self, bernoulli):
        """Test the Bernoulli closed form against the two-point sum."""
        closed = bernoulli.hellinger_affinity([-0.4], [1.3])
        assert closed == pytest.approx(bernoulli.numeric_affinity([-0.4], [1.3]).value, abs=1e-12)

    def test_gaussian_bhattacharyya(self, gaussian):
        """Test D_B = 2 log(1/A)."""
        assert bhattacharyya(gaussian, [0.0], [2.0]) == pytest.approx(1.0, abs=1e-9)

    def test_laplace_affinity(self, laplace):
        """Test the Laplace affinity (1 + delta/2) exp(-delta/2)."""
        assert laplace.hellinger_affinity([0.0], [1.0]) == pytest.approx(0.909796, abs=1e-6)
        assert laplace.hellinger_affinity([0.0], [8.0]) == pytest.approx(0.091578, abs=1e-6)

    def test_laplace_kl(self, laplace):
        """Test the Laplace KL divergence exp(-delta) + delta - 1."""
        assert laplace.kl_divergence([0.0], [1.0]) == pytest.approx(math.exp(-1.0), abs=1e-8)

    def test_product_family_multiplies(self):
        """Test that two-dimensional Laplace affinities factor over coordinates."""
        family = LaplaceLocation(2)
        one = LaplaceLocation(1).hellinger_affinity([0.0], [1.0])
        assert family.hellinger_affinity([0.0, 0.0], [1.0, 1.0]) == pytest.approx(one**2, rel=1e-10)

    def test_identical_members(self, gaussian, laplace):
        """Test that identical members have affinity one and zero divergence."""
        for family in (gaussian, laplace):
            assert family.hellinger_affinity([0.3], [0.3]) == pytest.approx(1.0)
            assert bhattacharyya(family, [0.3], [0.3]) == 0.0
            assert kl_divergence(family, [0.3], [0.3]) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("family_id,pair", [
        ("gaussian", ([0.0], [1.5])),
        ("bernoulli", ([-1.0], [2.0])),
        ("laplace", ([0.0], [3.0])),
    ])
    def test_ordering_chain(self, family_id, pair):
        """Test D_H <= D_B <= D."""
        family = get_family(family_id)
        assert ordering_chain_holds(family, *pair)
        assert squared_hellinger(family, *pair) <= bhattacharyya(family, *pair)

    @pytest.mark.parametrize("family_id", [
        "gaussian",
        "bernoulli",
        pytest.param("laplace", marks=pytest.mark.slow),
    ])
    def test_ordering_chain_random_pairs(self, family_id):
        """Test D_H <= D_B <= D on 1000 seeded random pairs."""
        family = get_family(family_id)
        rng = np.random.default_rng(20190417)
        pairs = rng.uniform(-5.0, 5.0, size=(1000, 2))
        violations = [(a, b) for a, b in pairs if not ordering_chain_holds(family, [a], [b])]
        assert violations == []

    @pytest.mark.parametrize("family_id", ["gaussian", "bernoulli"])
    def test_closed_form_matches_quadrature_random_pairs(self, family_id):
        """Test the closed-form affinity against the numeric oracle on 100 seeded pairs."""
        family = get_family(family_id)
        rng = np.random.default_rng(7)
        pairs = rng.uniform(-4.0, 4.0, size=(100, 2))
        gaps = [
            abs(family.hellinger_affinity([a], [b]) - family.numeric_affinity([a], [b]).value)
            for a, b in pairs
        ]
        assert max(gaps) <= 1e-6

    def test_vectorized_affinity(self, gaussian):
        """Test affinities to many grid points at once."""
        points = np.array([[0.0], [2.0], [-2.0]])
        values = gaussian.affinity_to_points([0.0], points)
        np.testing.assert_allclose(values, [1.0, 0.606531, 0.606531], atol=1e-6)

    def test_vectorized_kl(self, gaussian):
        """Test Gaussian KL |a - b|^2 / 2 to many grid points at once."""
        values = gaussian.kl_to_points([0.0], np.array([[0.0], [1.0], [-3.0]]))
        np.testing.assert_allclose(values, [0.0, 0.5, 4.5], atol=1e-12)

    def test_product_kl_adds(self):
        """Test that two-dimensional Laplace KL sums over coordinates."""
        family = LaplaceLocation(2)
        values = family.kl_to_points([0.0, 0.0], np.array([[1.0, 1.0], [0.0, 2.0]]))
        expected = [2.0 * math.exp(-1.0), math.exp(-2.0) + 1.0]
        np.testing.assert_allclose(values, expected, rtol=1e-8)

    def test_marginal_median(self, laplace):
        """Test that a symmetric location family has its median at theta."""
        np.testing.assert_allclose(laplace.marginal_median([1.5]), [1.5])
        assert laplace.marginal_cdf(0.0) == pytest.approx(0.5)
        assert laplace.marginal_density(0.0) == pytest.approx(0.5)


class TestDecayConstant:
    """Test Gaussian decay constants and KL-net radii."""

    def test_gaussian_constant(self, gaussian):
        """Test c = 1/8 for the unit Gaussian on any domain."""
        assert gaussian_decay_constant(gaussian, Box.unbounded(1)) == pytest.approx(0.125)

    def test_bernoulli_on_bounded_interval(self, bernoulli):
        """Test c = p(1 - p)/8 at the interval end, p = e/(1 + e)."""
        c = gaussian_decay_constant(bernoulli, Box.cube(1, -1.0, 1.0))
        assert c == pytest.approx(0.0245765, abs=1e-6)

    def test_bernoulli_needs_bounded_domain(self, bernoulli):
        """Test that non-constant curvature on an unbounded domain is refused."""
        with pytest.raises(PreconditionError, match="bounded parameter domain"):
            gaussian_decay_constant(bernoulli, Box.unbounded(1))

    def test_laplace_is_not_exponential(self, laplace):
        """Test that non-exponential families are refused."""
        with pytest.raises(PreconditionError):
            gaussian_decay_constant(laplace, Box.cube(1, -1.0, 1.0))

    def test_decay_bound_holds(self, bernoulli):
        """Test A <= exp(-c (a - b)^2) on the domain."""
        c = gaussian_decay_constant(bernoulli, Box.cube(1, -1.0, 1.0))
        for a, b in [(-1.0, 1.0), (-0.5, 0.9), (0.0, 1.0)]:
            assert bernoulli.hellinger_affinity([a], [b]) <= math.exp(-c * (a - b) ** 2) + 1e-12

    def test_kl_net_beta(self, gaussian):
        """Test beta = d lambda_max / 8 for the unit Gaussian."""
        assert kl_net_beta(gaussian, Box.unbounded(1)) == pytest.approx(0.125)
        assert kl_net_beta(GaussianLocation(2), Box.unbounded(2)) == pytest.approx(0.25)


class TestTrueDistributions:
    """Test true distributions."""

    def test_model_member_delegates(self, gaussian):
        """Test that a member's affinities match the family's."""
        truth = ModelMember(gaussian, [0.0])
        values = truth.affinity_to(gaussian, np.array([[2.0]]))
        assert values[0] == pytest.approx(0.606531, abs=1e-6)
        assert truth.kl_to(gaussian, np.array([[1.0]]))[0] == pytest.approx(0.5)

    def test_fisher_information_closed_form(self, gaussian):
        """Test that the closed form is the Hessian of psi."""
        truth = ModelMember(gaussian, [0.0])
        info = fisher_cross_information(truth, gaussian, [0.4])
        np.testing.assert_allclose(info, [[1.0]])

    def test_fisher_information_finite_difference(self, gaussian):
        """Test the finite-difference estimate against the closed form."""
        truth = ModelMember(gaussian, [0.0])
        info = fisher_cross_information(truth, gaussian, [0.4], method="finite-difference", n_samples=500, seed=3)
        assert info[0, 0] == pytest.approx(1.0, abs=1e-4)

    def test_fisher_information_unsupported_method(self, gaussian):
        """Test that unknown methods raise ValueError."""
        with pytest.raises(ValueError, match="Unsupported method"):
            fisher_cross_information(ModelMember(gaussian, [0.0]), gaussian, [0.0], method="magic")

    def test_external_distribution(self, gaussian):
        """Test a caller-supplied P with its own oracles."""
        truth = ExternalDistribution(
            dim=1,
            sampler=lambda n, rng: rng.standard_normal(n),
            log_density=lambda points: gaussian.log_density([0.0], points),
            affinity=lambda theta: gaussian.hellinger_affinity([0.0], theta),
        )
        data = truth.sample(10, seed=4)
        assert data.points.shape == (10, 1)
        assert truth.affinity_to(gaussian, np.array([[2.0]]))[0] == pytest.approx(0.606531, abs=1e-6)
        with pytest.raises(PreconditionError):
            truth.kl_to(gaussian, np.array([[0.0]]))


class TestRegistry:
    """Test the family registry."""

    def test_known_families(self):
        """Test building each built-in family."""
        assert isinstance(get_family("gaussian", 3), GaussianLocation)
        assert isinstance(get_family("Bernoulli"), BernoulliNatural)
        assert isinstance(get_family("laplace", 2), LaplaceLocation)

    def test_unknown_family(self):
        """Test that unknown ids raise ValueError."""
        with pytest.raises(ValueError, match="Unsupported family"):
            get_family("cauchy")

    def test_dimension_limits(self):
        """Test the supported dimensions."""
        with pytest.raises(ValueError):
            get_family("bernoulli", 2)
        with pytest.raises(ValueError):
            get_family("laplace", 3)



class TestQuadrature:
    """Test the quadrature oracles."""

    @staticmethod
    def normal(mu):
        return lambda x: -0.5 * math.log(2.0 * math.pi) - 0.5 * (x - mu) ** 2

    @staticmethod
    def laplace_density(mu):
        return lambda x: -math.log(2.0) - abs(x - mu)

    def test_gaussian_affinity(self):
        """Test the oracle against exp(-4/8) for N(0,1) vs N(2,1)."""
        result = quadrature_affinity(self.normal(0.0), self.normal(2.0), -12.0, 14.0)
        assert result.value == pytest.approx(0.606531, abs=1e-6)
        assert result.value == pytest.approx(math.exp(-0.5), abs=1e-8)
        assert result.error <= 1e-10

    def test_identical_densities(self):
        """Test that a density has affinity one with itself."""
        result = quadrature_affinity(self.normal(1.0), self.normal(1.0), -11.0, 13.0)
        assert result.value == pytest.approx(1.0, abs=1e-10)

    def test_laplace_with_breakpoints(self):
        """Test 5 e^{-4} for Laplace 0 vs 8 with the kinks as breakpoints."""
        result = quadrature_affinity(
            self.laplace_density(0.0), self.laplace_density(8.0), -36.0, 44.0, points=[0.0, 8.0]
        )
        assert result.value == pytest.approx(5.0 * math.exp(-4.0), abs=1e-9)

    def test_error_above_tolerance(self):
        """Test that an unreachable tolerance raises with the achieved estimate."""
        with pytest.raises(QuadratureError) as info:
            quadrature_affinity(self.laplace_density(0.0), self.laplace_density(8.0), -36.0, 44.0, tol=1e-300)
        assert info.value.tolerance == 1e-300
        assert info.value.error_estimate > 1e-300
