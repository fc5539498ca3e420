"""Unit tests for bound certificates and their assumption ledgers."""
import json
import math

import pytest
from pydantic import ValidationError

from src.bounds import certificate as ledger
from src.bounds.certificate import (
    MULTIPLIER,
    Assumption,
    AssumptionStatus,
    BoundCertificate,
    Expectation,
    Provenance,
    TheoremId,
    make_certificate,
)


def _kl_net_assumptions():
    return [Assumption.asserted(ledger.KL_NET), Assumption.verified(ledger.TWICE_KRAFT)]


class TestExpectation:
    """Test expectation records."""

    def test_coerce_float(self):
        """Test that plain numbers are exact expectations."""
        e = Expectation.coerce(1.5)
        assert e.value == 1.5
        assert e.provenance == Provenance.EXACT

    def test_monte_carlo(self):
        """Test Monte Carlo expectations carry their standard error."""
        e = Expectation.monte_carlo(0.2, 0.01)
        assert e.provenance == Provenance.MONTE_CARLO
        assert "monte-carlo" in e.describe()
        assert "+/-" in e.describe()

    def test_assumption_status_follows_provenance(self):
        """Test that only exact expectations count as checked."""
        exact = Assumption.for_expectation("x", Expectation.coerce(1.0))
        bound = Assumption.for_expectation("x", Expectation(value=1.0, provenance=Provenance.BOUND))
        assert exact.checked == AssumptionStatus.CHECKED
        assert bound.checked == AssumptionStatus.ASSERTED


class TestBoundCertificate:
    """Test certificate validation and serialization."""

    def test_value_is_reassembled(self):
        """Test value = multiplier * sum of components."""
        cert = make_certificate(
            TheoremId.KL_NET, {MULTIPLIER: 2.0, "a": 0.1, "b": 0.2}, _kl_net_assumptions(), {"n": 10}
        )
        assert cert.value == pytest.approx(0.6)
        assert cert.reassemble() == pytest.approx(cert.value)
        assert cert.informative

    def test_rejects_mismatched_value(self):
        """Test that a value disagreeing with its components is rejected."""
        with pytest.raises(ValidationError, match="does not match"):
            BoundCertificate(
                theorem_id=TheoremId.KL_NET, value=1.0, components={"a": 0.5},
                assumptions=_kl_net_assumptions(),
            )

    def test_rejects_incomplete_ledger(self):
        """Test that every hypothesis of the theorem must be listed."""
        with pytest.raises(ValidationError, match="missing"):
            make_certificate(TheoremId.KL_NET, {"a": 0.5}, [Assumption.asserted(ledger.KL_NET)], {})

    def test_rejects_unchecked_assumption(self):
        """Test that an assumption neither checked nor asserted is rejected."""
        unchecked = Assumption(name=ledger.KL_NET, checked=AssumptionStatus.UNCHECKED)
        with pytest.raises(ValidationError, match="neither checked nor asserted"):
            make_certificate(
                TheoremId.KL_NET, {"a": 0.5}, [unchecked, Assumption.verified(ledger.TWICE_KRAFT)], {}
            )

    def test_infinite_value(self):
        """Test that infinite components give a non-informative certificate."""
        cert = make_certificate(TheoremId.KL_NET, {"a": math.inf, "b": 1.0}, _kl_net_assumptions(), {})
        assert math.isinf(cert.value)
        assert not cert.informative

    def test_json_round_trip_keeps_infinity(self):
        """Test that infinite values serialize as strings and parse back."""
        cert = make_certificate(TheoremId.KL_NET, {"a": math.inf}, _kl_net_assumptions(), {})
        payload = json.loads(cert.model_dump_json())
        assert payload["value"] == "Infinity"
        assert math.isinf(BoundCertificate.model_validate_json(cert.model_dump_json()).value)

    def test_empirical_flag(self):
        """Test that Monte Carlo inputs mark the certificate empirical."""
        cert = make_certificate(
            TheoremId.KL_NET, {"a": 0.5}, _kl_net_assumptions(), {},
            expectations=[Expectation.monte_carlo(0.5)],
        )
        assert cert.empirical

    def test_satisfies_map(self):
        """Test the per-hypothesis satisfied map."""
        cert = make_certificate(TheoremId.KL_NET, {"a": 0.5}, _kl_net_assumptions(), {})
        assert cert.satisfies == {ledger.KL_NET: False, ledger.TWICE_KRAFT: True}

    def test_every_theorem_has_a_ledger(self):
        """Test that each theorem id lists its hypotheses, starting with the sampling model."""
        for theorem in TheoremId:
            required = ledger.REQUIRED_ASSUMPTIONS[theorem]
            assert required
            if theorem != TheoremId.KL_NET:
                assert required[0] == ledger.IID
