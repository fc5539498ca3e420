"""Tests for the randomized inequality checks."""
import math

import pytest

from src.utils.seeding import derive_rng
from src.verify.lemmas import (
    CHECKS,
    ORACLE_TRIALS,
    POWER_DECAY_REGIMES,
    SUMMATION_TRIALS,
    LemmaCheckLedger,
    Trial,
    check_power_decay,
    lemma_suite,
    run_check,
)


FAST_CHECKS = [
    "squared-norm",
    "quadratic-form",
    "log-sum",
    "jensen-difference",
    "grid-infimum",
    "affinity-cauchy-schwarz",
    "affinity-first-moments",
    "affinity-median",
    "affinity-marginal-median",
    "exponential-affinity-gaussian",
    "entropy-extension",
    "entropy-extension-inequality",
    "entropy-extension-size",
]


class TestRunCheck:
    """Test individual checks."""

    @pytest.mark.parametrize("check_id", FAST_CHECKS)
    def test_check_passes(self, check_id):
        """Test that the inequality holds on random admissible inputs."""
        record = run_check(check_id, seed=20190417, trials=200)
        assert record.check_id == check_id
        assert record.trials == 200
        assert record.failures == 0, record.failing_inputs
        assert record.failing_inputs == []

    def test_reproducible(self):
        """Test that a record is determined by its seed."""
        first = run_check("log-sum", seed=5, trials=50)
        second = run_check("log-sum", seed=5, trials=50)
        assert first == second

    def test_trials_capped(self):
        """Test that summation checks run at most their cap."""
        record = run_check("gaussian-summation", seed=1, trials=SUMMATION_TRIALS + 1000)
        assert record.trials == SUMMATION_TRIALS
        assert record.requested_trials == SUMMATION_TRIALS + 1000
        assert run_check("squared-norm", seed=1, trials=SUMMATION_TRIALS + 1).trials == SUMMATION_TRIALS + 1

    def test_records_failures(self, mocker):
        """Test that a negative margin is counted and its inputs kept."""
        mocker.patch.dict(CHECKS, {"always-fails": (lambda rng: Trial(-1.0, 1.0, {"x": 2.0}), None)})
        record = run_check("always-fails", seed=3, trials=4, index=0)
        assert record.failures == 4
        assert record.worst_margin == -1.0
        assert record.failing_inputs[0] == {"trial": 0, "margin": -1.0, "x": 2.0}

    def test_records_exceptions(self, mocker):
        """Test that a raising trial counts as a failure instead of aborting the run."""
        def broken(rng):
            raise ArithmeticError("overflow")

        mocker.patch.dict(CHECKS, {"broken": (broken, None)})
        record = run_check("broken", seed=3, trials=2, index=0)
        assert record.failures == 2
        assert "ArithmeticError" in record.failing_inputs[0]["error"]

    def test_rounding_is_tolerated(self, mocker):
        """Test that a margin within rounding of zero is not a failure."""
        mocker.patch.dict(CHECKS, {"tight": (lambda rng: Trial(-1e-12, 1.0, {}), None)})
        assert run_check("tight", seed=3, trials=3, index=0).failures == 0


class TestFixedExamples:
    """Test the inequalities on hand-computed Laplace inputs."""

    def test_median_affinity(self, laplace):
        """Test A = 1.5 e^{-1/2} <= exp(-z^2/2) for medians one apart."""
        affinity = laplace.hellinger_affinity([0.0], [1.0])
        z = abs(laplace.marginal_cdf(-1.0) - 0.5)
        assert affinity == pytest.approx(0.909796, abs=1e-6)
        assert math.exp(-0.5 * z * z) == pytest.approx(0.951280, abs=1e-6)
        assert affinity <= math.exp(-0.5 * z * z)

    def test_first_moments(self, laplace):
        """Test A = 5 e^{-4} <= 4 s / ||EX - EY|| at distance 8."""
        affinity = laplace.hellinger_affinity([0.0], [8.0])
        bound = 4.0 * laplace.first_central_moment / 8.0
        assert affinity == pytest.approx(0.091578, abs=1e-6)
        assert bound == pytest.approx(0.5)
        assert affinity <= bound


class TestPowerDecay:
    """Test the power-decay check in each regime."""

    @pytest.mark.parametrize("regime", POWER_DECAY_REGIMES)
    def test_regime(self, regime):
        """Test that every applicable regime bound covers the oracle sum."""
        rng = derive_rng(20190417, 99)
        for _ in range(5):
            trial = check_power_decay(rng, regime)
            assert trial.inputs["regime"] == regime
            assert trial.margin >= -1e-9 * trial.scale


class TestLemmaSuite:
    """Test the full suite."""

    def test_rejects_zero_trials(self):
        """Test that trials must be positive."""
        with pytest.raises(ValueError, match="trials"):
            lemma_suite(seed=1, trials=0)

    def test_ledger_lookup(self):
        """Test record lookup by id."""
        ledger = LemmaCheckLedger(seed=1, trials=1, records=[run_check("log-sum", 1, 1)])
        assert ledger.record("log-sum").trials == 1
        with pytest.raises(KeyError):
            ledger.record("missing")

    @pytest.mark.slow
    def test_suite_passes(self):
        """Test that every registered check passes for a fixed seed."""
        ledger = lemma_suite(seed=20190417, trials=ORACLE_TRIALS)
        assert [r.check_id for r in ledger.records] == list(CHECKS)
        assert ledger.passed, [r.check_id for r in ledger.records if r.failures]
        assert ledger.total_failures == 0
