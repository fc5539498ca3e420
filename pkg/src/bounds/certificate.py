"""
Bound certificates and their assumption ledgers.

@help.category Bounds
@help.title Bound Certificate
@help.description A certificate is the value of one risk bound together with the components it
was assembled from, the hypotheses it rests on and the parameters it was evaluated at. The
value is always multiplier * (sum of additive components), so it can be reassembled and
audited from the JSON document alone.
@help.example
    cert = minimax_certificate(beta=0.125, c=0.125, d=1, n=100)
    cert.value            # 0.105429
    cert.model_dump_json()
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.numerics import fsum

REASSEMBLY_TOLERANCE = 1e-12
MULTIPLIER = "multiplier"


class TheoremId(str, Enum):
    """Identifiers of the bounds a certificate can come from."""

    GENERAL = "general"
    SUBTRACT_PENALTY = "subtract-penalty"
    BHATTACHARYYA = "bhattacharyya"
    BHATTACHARYYA_MINUS_PENALTY = "bhattacharyya-minus-penalty"
    GAUSSIAN_DECAY = "gaussian-decay"
    GAUSSIAN_DECAY_CONCRETE = "gaussian-decay-concrete"
    MINIMAX = "minimax"
    MIXED_REGIME = "mixed-regime"
    SQUARED_NORM = "squared-norm"
    ENTROPY = "entropy"
    QUADRATIC = "quadratic"
    PENALTY_PSEUDO = "penalty-pseudo"
    MAP = "map"
    KL_NET = "kl-net"


class AssumptionStatus(str, Enum):
    CHECKED = "yes"
    UNCHECKED = "no"
    ASSERTED = "asserted-by-caller"


class Provenance(str, Enum):
    EXACT = "exact"
    BOUND = "bound"
    MONTE_CARLO = "monte-carlo"


# Hypothesis names, shared by the calculators and the ledger completeness check.
IID = "iid sample"
COUNTABLE_MODEL = "countable model with penalty"
PSEUDO_EXPECTATION = "expected pseudo-penalty at the estimate"
PENALTY_EXPECTATION = "expected penalty at the estimate"
ALPHA_RANGE = "alpha in [0, 1)"
AFFINITY_RANGE = "affinity in (0, 1]"
GAUSSIAN_DECAY = "affinity Gaussian decay with c > 0"
EPS_RULE = "eps = sqrt(2/n)"
ZERO_PENALTY = "zero penalty"
KL_NET = "KL-net of the parameter set"
GAUSSIAN_CENTER = "Gaussian decay within radius R"
POWER_TAIL = "power decay outside radius R"
RADIUS_GATE = "R >= 11 a^(1/b) v 3 eps"
SAMPLE_GATE = "n >= 2(d+1)/b"
SQUARED_NORM_PENALTY = "squared-norm penalty"
ENTROPY_BOUND = "entropy of the estimate"
QUADRATIC_ALPHA = "alpha > 0"
VARIANCE = "variance of the estimate"
PENALTY_ALPHA = "alpha >= 0"
PRIOR_PMF = "penalty is log(1/q) for a prior pmf q"
TWICE_KRAFT = "twice-Kraft penalty"

REQUIRED_ASSUMPTIONS: Dict[TheoremId, tuple] = {
    TheoremId.GENERAL: (IID, COUNTABLE_MODEL, PSEUDO_EXPECTATION),
    TheoremId.SUBTRACT_PENALTY: (IID, COUNTABLE_MODEL, PSEUDO_EXPECTATION, PENALTY_EXPECTATION),
    TheoremId.BHATTACHARYYA: (IID, COUNTABLE_MODEL, ALPHA_RANGE, AFFINITY_RANGE),
    TheoremId.BHATTACHARYYA_MINUS_PENALTY: (IID, COUNTABLE_MODEL, ALPHA_RANGE, AFFINITY_RANGE, PENALTY_EXPECTATION),
    TheoremId.GAUSSIAN_DECAY: (IID, GAUSSIAN_DECAY, PENALTY_EXPECTATION),
    TheoremId.GAUSSIAN_DECAY_CONCRETE: (IID, GAUSSIAN_DECAY, EPS_RULE, ZERO_PENALTY),
    TheoremId.MINIMAX: (IID, GAUSSIAN_DECAY, EPS_RULE, KL_NET),
    TheoremId.MIXED_REGIME: (IID, GAUSSIAN_CENTER, POWER_TAIL, RADIUS_GATE, SAMPLE_GATE, PENALTY_EXPECTATION),
    TheoremId.SQUARED_NORM: (IID, GAUSSIAN_CENTER, POWER_TAIL, RADIUS_GATE, SQUARED_NORM_PENALTY),
    TheoremId.ENTROPY: (IID, ENTROPY_BOUND, PENALTY_EXPECTATION),
    TheoremId.QUADRATIC: (IID, QUADRATIC_ALPHA, VARIANCE, PENALTY_EXPECTATION),
    TheoremId.PENALTY_PSEUDO: (IID, COUNTABLE_MODEL, PENALTY_ALPHA, PENALTY_EXPECTATION),
    TheoremId.MAP: (IID, COUNTABLE_MODEL, PRIOR_PMF, PENALTY_EXPECTATION),
    TheoremId.KL_NET: (KL_NET, TWICE_KRAFT),
}


class Expectation(BaseModel):
    """
    A population quantity such as E L(theta_hat), with where its value came from.

    @help.title Expectation Model
    @help.description Exact values, analytic bounds and Monte Carlo estimates are accepted;
    certificates built from Monte Carlo estimates are labelled empirical.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    # @help.description The number plugged into the bound
    provenance: Provenance = Provenance.EXACT
    # @help.description exact, bound or monte-carlo
    stderr: Optional[float] = None
    # @help.description Standard error of a Monte Carlo estimate

    @classmethod
    def coerce(cls, value) -> "Expectation":
        if isinstance(value, Expectation):
            return value
        return cls(value=float(value))

    @classmethod
    def monte_carlo(cls, value: float, stderr: Optional[float] = None) -> "Expectation":
        return cls(
            value=float(value),
            provenance=Provenance.MONTE_CARLO,
            stderr=None if stderr is None else float(stderr),
        )

    def describe(self) -> str:
        if self.stderr is not None:
            return f"{self.provenance.value}: {self.value:.6g} +/- {self.stderr:.3g}"
        return f"{self.provenance.value}: {self.value:.6g}"


class Assumption(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    # @help.description Hypothesis of the underlying bound
    checked: AssumptionStatus
    # @help.description yes, no or asserted-by-caller
    detail: str = ""

    @classmethod
    def verified(cls, name: str, detail: str = "") -> "Assumption":
        return cls(name=name, checked=AssumptionStatus.CHECKED, detail=detail)

    @classmethod
    def asserted(cls, name: str, detail: str = "") -> "Assumption":
        return cls(name=name, checked=AssumptionStatus.ASSERTED, detail=detail)

    @classmethod
    def for_expectation(cls, name: str, expectation: Expectation) -> "Assumption":
        status = AssumptionStatus.CHECKED if expectation.provenance == Provenance.EXACT else AssumptionStatus.ASSERTED
        return cls(name=name, checked=status, detail=expectation.describe())


class BoundCertificate(BaseModel):
    """
    Upper bound on the Bhattacharyya risk E D_B(P, P_theta_hat).

    @help.title BoundCertificate Model
    @help.description JSON fields: theorem_id, value, components, assumptions, params, plus
    informative (False for infinite values), empirical (True when a Monte Carlo estimate
    entered) and path (exact or envelope summation, when relevant).
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    theorem_id: TheoremId
    # @help.description Which bound produced the value
    value: float
    # @help.description Upper bound on the expected Bhattacharyya divergence
    components: Dict[str, float]
    # @help.description Additive terms, plus an optional "multiplier" applied to their sum
    assumptions: List[Assumption]
    # @help.description Hypothesis ledger; every entry is checked or asserted by the caller
    params: Dict[str, Any] = Field(default_factory=dict)
    # @help.description Parameters the bound was evaluated at (n, eps, d, alpha, c, ...)
    informative: bool = True
    empirical: bool = False
    path: Optional[str] = None

    @field_validator("assumptions")
    @classmethod
    def _no_unchecked(cls, assumptions: List[Assumption]) -> List[Assumption]:
        for assumption in assumptions:
            if assumption.checked == AssumptionStatus.UNCHECKED:
                raise ValueError(f"assumption neither checked nor asserted: {assumption.name}")
        return assumptions

    @model_validator(mode="after")
    def _audit(self) -> "BoundCertificate":
        names = {a.name for a in self.assumptions}
        missing = [name for name in REQUIRED_ASSUMPTIONS[self.theorem_id] if name not in names]
        if missing:
            raise ValueError(f"assumption ledger for {self.theorem_id.value} is missing: {', '.join(missing)}")
        total = self.reassemble()
        if math.isfinite(self.value) or math.isfinite(total):
            if abs(total - self.value) > REASSEMBLY_TOLERANCE * max(1.0, abs(self.value)):
                raise ValueError(f"value {self.value!r} does not match its components ({total!r})")
        return self

    def reassemble(self) -> float:
        """multiplier * sum of the additive components."""
        multiplier = self.components.get(MULTIPLIER, 1.0)
        return multiplier * fsum(v for k, v in self.components.items() if k != MULTIPLIER)

    @property
    def satisfies(self) -> Dict[str, bool]:
        return {a.name: a.checked == AssumptionStatus.CHECKED for a in self.assumptions}


def make_certificate(
    theorem_id: TheoremId,
    components: Dict[str, float],
    assumptions: List[Assumption],
    params: Dict[str, Any],
    path: Optional[str] = None,
    expectations: Optional[List[Expectation]] = None,
) -> BoundCertificate:
    """Computes the value from the components and builds the certificate."""
    multiplier = components.get(MULTIPLIER, 1.0)
    terms = [v for k, v in components.items() if k != MULTIPLIER]
    if any(math.isinf(v) and v > 0 for v in terms):
        value = math.inf
    else:
        value = multiplier * fsum(terms)
    empirical = any(e.provenance == Provenance.MONTE_CARLO for e in expectations or [])
    return BoundCertificate(
        theorem_id=theorem_id,
        value=value,
        components=components,
        assumptions=assumptions,
        params=params,
        informative=math.isfinite(value),
        empirical=empirical,
        path=path,
    )
