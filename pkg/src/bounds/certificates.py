"""
Certificate calculators, one per risk bound.

@help.category Bounds
@help.title Certificate Calculators
@help.description Each calculator checks the hypotheses it can check, records the rest as
asserted by the caller, and returns a BoundCertificate whose value is the bound on the expected
Bhattacharyya divergence E D_B(P, P_theta_hat). All logarithms are natural. Negative penalty
expectations are not floored, so a certificate can fall below the resolvability index.
@help.use_case Comparing the bounds available for one experiment; feeding Monte Carlo checks.
"""
import logging
import math
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from src.bounds import certificate as ledger
from src.bounds.certificate import (
    MULTIPLIER,
    Assumption,
    BoundCertificate,
    Expectation,
    TheoremId,
    make_certificate,
)
from src.estimator.penalty import CodelengthPenalty, Penalty, PseudoPenalty
from src.grid.lattice import EpsGrid
from src.grid.summation import gaussian_sum_bound
from src.models.base import LocationFamily, ParametricFamily
from src.utils.errors import PreconditionError

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)

ExpectationLike = Union[Expectation, float]
AffinityLike = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _require_n(n: int) -> None:
    if n < 1:
        raise ValueError("sample size n must be >= 1")


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def _twice_log_sum(log_terms: np.ndarray) -> float:
    """2 log sum exp(log_terms), +inf when the sum diverges."""
    value = 2.0 * float(logsumexp(np.asarray(log_terms, dtype=float)))
    if math.isnan(value):
        return math.inf
    return value


def _warn_if_uninformative(cert: BoundCertificate) -> BoundCertificate:
    if not cert.informative:
        logger.warning("%s certificate is not informative (value %s)", cert.theorem_id.value, cert.value)
    return cert


# ------------------------------------------------------------------- general


def general_certificate(
    grid: EpsGrid,
    penalty: Penalty,
    pseudo: Optional[Union[PseudoPenalty, Sequence[float], np.ndarray]],
    expected_pseudo: ExpectationLike,
    resolvability: float,
    n: int,
    mode: str = "add",
    expected_penalty: Optional[ExpectationLike] = None,
) -> BoundCertificate:
    """
    R + [2 log sum exp(-(L + pseudo)/2) + E pseudo(theta_hat)]/n, or with mode="subtract"
    R + [2 log sum exp(-pseudo/2) + E pseudo(theta_hat) - E L(theta_hat)]/n.

    @help.title General Certificate
    @help.description ``pseudo`` is a PseudoPenalty, a table of values in grid enumeration
    order, or None for the zero pseudo-penalty. With a zero pseudo-penalty and a twice-Kraft
    penalty the value reduces to the resolvability index.
    @help.example
        general_certificate(grid, ZeroPenalty(), None, 0.0, 0.0, 100).value  # 2 log(101)/100 on 101 points
    """
    _require_n(n)
    if mode not in ("add", "subtract"):
        raise ValueError(f"Unsupported mode: {mode}. Supported: add, subtract")
    points = grid.enumerate_points()
    if pseudo is None:
        pseudo_values = np.zeros(points.shape[0])
    elif isinstance(pseudo, PseudoPenalty):
        pseudo_values = pseudo.evaluate(points)
    else:
        pseudo_values = np.asarray(pseudo, dtype=float).ravel()
        if pseudo_values.size != points.shape[0]:
            raise ValueError("pseudo-penalty table must cover every grid point")
    e_pseudo = Expectation.coerce(expected_pseudo)
    expectations = [e_pseudo]

    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.verified(ledger.COUNTABLE_MODEL, f"{points.shape[0]} grid points, penalty {penalty.describe()}"),
        Assumption.for_expectation(ledger.PSEUDO_EXPECTATION, e_pseudo),
    ]
    components = {"resolvability": float(resolvability)}
    if mode == "add":
        theorem = TheoremId.GENERAL
        log_sum = _twice_log_sum(-0.5 * (penalty.evaluate(points) + pseudo_values))
    else:
        if expected_penalty is None:
            raise ValueError("mode='subtract' needs the expected penalty at the estimate")
        theorem = TheoremId.SUBTRACT_PENALTY
        e_penalty = Expectation.coerce(expected_penalty)
        expectations.append(e_penalty)
        assumptions.append(Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty))
        log_sum = _twice_log_sum(-0.5 * pseudo_values)
        components["penalty_expectation_term"] = -e_penalty.value / n
    components["log_sum_term"] = log_sum / n
    components["pseudo_expectation_term"] = e_pseudo.value / n

    cert = make_certificate(
        theorem, components, assumptions, {"n": n, "eps": grid.eps, "d": grid.dim, "mode": mode},
        expectations=expectations,
    )
    return _warn_if_uninformative(cert)


# ------------------------------------------------------------ Bhattacharyya


def _affinity_values(affinity: AffinityLike, points: np.ndarray) -> np.ndarray:
    values = affinity(points) if callable(affinity) else affinity
    values = np.asarray(values, dtype=float).ravel()
    if values.size != points.shape[0]:
        raise ValueError("affinity must give one value per grid point")
    if np.any(values <= 0.0) or np.any(values > 1.0 + 1e-12):
        raise PreconditionError(ledger.AFFINITY_RANGE, f"range [{values.min():.3g}, {values.max():.3g}]")
    return np.minimum(values, 1.0)


def bhattacharyya_certificate(
    grid: EpsGrid,
    penalty: Penalty,
    alpha: float,
    affinity: Optional[AffinityLike],
    resolvability: float,
    n: int,
    with_penalty: bool = True,
    expected_penalty: Optional[ExpectationLike] = None,
    decay_constant: Optional[float] = None,
) -> BoundCertificate:
    """
    Pseudo-penalty alpha n D_B.

    with_penalty=True:  (1/(1-alpha)) [R + 2 log sum exp(-L/2) A^(alpha n) / n]
    with_penalty=False: (1/(1-alpha)) [R + (2 log sum A^(alpha n) - E L(theta_hat)) / n]

    @help.title Bhattacharyya Certificate
    @help.description The sum runs over the grid exactly, or, when ``decay_constant`` c is given,
    is bounded through A <= exp(-c ||theta - theta*||^2) by (1 + 2 sqrt(pi)/(eps sqrt(alpha n c)))^d
    (times exp(-min L/2) with the penalty). The certificate's ``path`` records which was used.
    """
    _require_n(n)
    if alpha == 1.0:
        raise ValueError("alpha = 1 divides by zero; use alpha in [0, 1)")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    points = grid.enumerate_points()
    penalty_values = penalty.evaluate(points)
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.verified(ledger.COUNTABLE_MODEL, f"{points.shape[0]} grid points"),
        Assumption.verified(ledger.ALPHA_RANGE, f"alpha={alpha:g}"),
    ]
    expectations = []

    if decay_constant is None:
        if affinity is None:
            raise ValueError("either affinity values or a decay constant are required")
        path = "exact"
        log_affinity = np.log(_affinity_values(affinity, points))
        exponent = alpha * n * log_affinity
        if with_penalty:
            exponent = exponent - 0.5 * penalty_values
        log_sum = _twice_log_sum(exponent)
        assumptions.append(Assumption.verified(ledger.AFFINITY_RANGE, "all grid points"))
    else:
        _require_positive(c=decay_constant)
        path = "envelope"
        if alpha == 0.0:
            log_sum = 2.0 * math.log(points.shape[0])
        else:
            log_sum = 2.0 * math.log(gaussian_sum_bound(grid.eps, alpha * n * decay_constant, grid.dim, off_center=True))
        if with_penalty:
            log_sum -= float(np.min(penalty_values))
        assumptions.append(Assumption.asserted(ledger.AFFINITY_RANGE, f"via Gaussian decay c={decay_constant:g}"))

    components = {MULTIPLIER: 1.0 / (1.0 - alpha), "resolvability": float(resolvability), "log_sum_term": log_sum / n}
    if with_penalty:
        theorem = TheoremId.BHATTACHARYYA
    else:
        if expected_penalty is None:
            raise ValueError("the bound without penalty in the sum needs the expected penalty at the estimate")
        theorem = TheoremId.BHATTACHARYYA_MINUS_PENALTY
        e_penalty = Expectation.coerce(expected_penalty)
        expectations.append(e_penalty)
        assumptions.append(Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty))
        components["penalty_expectation_term"] = -e_penalty.value / n

    params = {"n": n, "eps": grid.eps, "d": grid.dim, "alpha": alpha}
    if decay_constant is not None:
        params["c"] = decay_constant
    cert = make_certificate(theorem, components, assumptions, params, path=path, expectations=expectations)
    return _warn_if_uninformative(cert)


# ----------------------------------------------------------- Gaussian decay


def _decay_assumption(c: float, c_checked: bool) -> Assumption:
    if c_checked:
        return Assumption.verified(ledger.GAUSSIAN_DECAY, f"c={c:g} from the curvature of psi")
    return Assumption.asserted(ledger.GAUSSIAN_DECAY, f"c={c:g}")


def _is_sqrt_rule(eps: float, n: int) -> bool:
    return abs(eps - math.sqrt(2.0 / n)) <= 1e-12 * max(1.0, eps)


def gaussian_decay_concrete_certificate(
    d: int,
    n: int,
    c: float,
    kl_to_grid: float,
    c_checked: bool = False,
) -> BoundCertificate:
    """
    2 D(P || grid) + 4 d log(1 + 4/sqrt(c)) / n, for eps = sqrt(2/n) and a zero penalty.

    @help.example
        gaussian_decay_concrete_certificate(1, 100, 0.125, 0.0).value  # 0.100429
    """
    _require_n(n)
    if c <= 0.0:
        raise ValueError("decay constant c must be positive")
    components = {
        MULTIPLIER: 2.0,
        "kl_to_grid": float(kl_to_grid),
        "log_sum_term": 2.0 * d * math.log1p(4.0 / math.sqrt(c)) / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        _decay_assumption(c, c_checked),
        Assumption.verified(ledger.EPS_RULE, f"eps={math.sqrt(2.0 / n):.6g}"),
        Assumption.verified(ledger.ZERO_PENALTY),
    ]
    params = {"n": n, "eps": math.sqrt(2.0 / n), "d": d, "c": c}
    return make_certificate(TheoremId.GAUSSIAN_DECAY_CONCRETE, components, assumptions, params)


def gaussian_decay_certificate(
    eps: float,
    d: int,
    n: int,
    c: float,
    resolvability: float,
    expected_penalty: ExpectationLike = 0.0,
    c_checked: bool = False,
    penalty_is_zero: bool = False,
) -> BoundCertificate:
    """
    2 [R + (2 d log(1 + 2 sqrt(2 pi)/(eps sqrt(n c))) - E L(theta_hat)) / n].

    @help.title Gaussian Decay Certificate
    @help.description ``c_checked`` says whether c came from gaussian_decay_constant (checked) or
    from the caller (asserted). When eps = sqrt(2/n) and the penalty is zero, params carry the
    concrete form as ``concrete_value``; the resolvability index is then D(P || grid).
    """
    _require_n(n)
    _require_positive(eps=eps)
    if c <= 0.0:
        raise ValueError("decay constant c must be positive")
    e_penalty = Expectation.coerce(expected_penalty)
    components = {
        MULTIPLIER: 2.0,
        "resolvability": float(resolvability),
        "log_sum_term": 2.0 * d * math.log1p(2.0 * SQRT_2PI / (eps * math.sqrt(n * c))) / n,
        "penalty_expectation_term": -e_penalty.value / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        _decay_assumption(c, c_checked),
        Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty),
    ]
    params = {"n": n, "eps": eps, "d": d, "c": c}
    if penalty_is_zero and _is_sqrt_rule(eps, n):
        params["concrete_value"] = gaussian_decay_concrete_certificate(d, n, c, resolvability, c_checked).value
    return make_certificate(TheoremId.GAUSSIAN_DECAY, components, assumptions, params, expectations=[e_penalty])


def minimax_certificate(beta: float, c: float, d: int, n: int, c_checked: bool = False) -> BoundCertificate:
    """
    4 [beta + d log(1 + 4/sqrt(c))] / n.

    @help.title Minimax Certificate
    @help.description Holds uniformly over P in the model when every point is within KL
    beta eps^2 of the grid (asserted by the caller, or computed by kl_net_beta) and eps = sqrt(2/n).
    @help.example
        minimax_certificate(0.125, 0.125, 1, 100).value  # 0.105429
    """
    _require_n(n)
    _require_positive(beta=beta, c=c)
    components = {
        "kl_net_term": 4.0 * beta / n,
        "log_sum_term": 4.0 * d * math.log1p(4.0 / math.sqrt(c)) / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        _decay_assumption(c, c_checked),
        Assumption.verified(ledger.EPS_RULE),
        Assumption.asserted(ledger.KL_NET, f"D(P || nearest grid point) <= {beta:g} eps^2"),
    ]
    return make_certificate(TheoremId.MINIMAX, components, assumptions, {"n": n, "d": d, "beta": beta, "c": c})


# -------------------------------------------------------------- power decay


def _radius_gate(a: float, b: float, R: float, eps: float) -> None:
    floor = max(11.0 * a ** (1.0 / b), 3.0 * eps)
    if R < floor:
        raise PreconditionError(ledger.RADIUS_GATE, f"R={R:g} < {floor:g}")


def mixed_regime_certificate(
    eps: float,
    d: int,
    n: int,
    c: float,
    a: float,
    b: float,
    R: float,
    resolvability: float,
    expected_penalty: ExpectationLike = 0.0,
) -> BoundCertificate:
    """
    2 [R_res + (d [2 log(1 + 2 sqrt(2 pi)/(eps sqrt(n c))) + 2 log(1 + 4 sqrt(2) R/(eps sqrt(n b)))] + 3 - E L) / n].

    @help.title Mixed-Regime Certificate
    @help.description Affinity decays like a Gaussian within radius R of theta* and like
    (a/||theta - theta*||^b) outside. Needs R >= 11 a^(1/b) v 3 eps and n >= 2(d+1)/b; a
    violated gate raises PreconditionError naming it (squared_norm_certificate has no sample-size gate).
    """
    _require_n(n)
    _require_positive(eps=eps, a=a, b=b, R=R)
    _radius_gate(a, b, R, eps)
    if n < 2.0 * (d + 1) / b:
        raise PreconditionError(ledger.SAMPLE_GATE, f"n={n} < {2.0 * (d + 1) / b:g}")
    _require_positive(c=c)
    e_penalty = Expectation.coerce(expected_penalty)
    components = {
        MULTIPLIER: 2.0,
        "resolvability": float(resolvability),
        "gaussian_center_term": 2.0 * d * math.log1p(2.0 * SQRT_2PI / (eps * math.sqrt(n * c))) / n,
        "power_tail_term": 2.0 * d * math.log1p(4.0 * math.sqrt(2.0) * R / (eps * math.sqrt(n * b))) / n,
        "log_sum_constant": 3.0 / n,
        "penalty_expectation_term": -e_penalty.value / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.asserted(ledger.GAUSSIAN_CENTER, f"c={c:g}"),
        Assumption.asserted(ledger.POWER_TAIL, f"a={a:g}, b={b:g}"),
        Assumption.verified(ledger.RADIUS_GATE, f"R={R:g}"),
        Assumption.verified(ledger.SAMPLE_GATE, f"n={n}"),
        Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty),
    ]
    params = {"n": n, "eps": eps, "d": d, "c": c, "a": a, "b": b, "R": R}
    return make_certificate(TheoremId.MIXED_REGIME, components, assumptions, params, expectations=[e_penalty])


def squared_norm_certificate(
    eps: float,
    d: int,
    n: int,
    c: float,
    a: float,
    b: float,
    R: float,
    theta_star_norm: float,
    resolvability: float,
) -> BoundCertificate:
    """
    2 R_res + 4 d [log(1 + 2 sqrt(2 pi)/(eps sqrt(n c))) + log(1 + (29 sqrt(d) + 6 R)/(eps sqrt(n b)))] / n
    + [4 log(2 + 44/R^3) + 2 ||theta*||^2 + 8] / n, with the penalty ||theta||^2 and any n >= 1.

    The tail sum rests on the three power-decay regimes (large-n, reversed, middle), which
    together cover every sample size once the squared norm supplies a Gaussian factor.
    """
    _require_n(n)
    _require_positive(eps=eps, a=a, b=b, R=R)
    _radius_gate(a, b, R, eps)
    _require_positive(c=c)
    components = {
        "resolvability_term": 2.0 * float(resolvability),
        "gaussian_center_term": 4.0 * d * math.log1p(2.0 * SQRT_2PI / (eps * math.sqrt(n * c))) / n,
        "power_tail_term": 4.0 * d * math.log1p((29.0 * math.sqrt(d) + 6.0 * R) / (eps * math.sqrt(n * b))) / n,
        "log_sum_constant": 4.0 * math.log(2.0 + 44.0 / R**3) / n,
        "center_norm_term": 2.0 * theta_star_norm**2 / n,
        "constant_term": 8.0 / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.asserted(ledger.GAUSSIAN_CENTER, f"c={c:g}"),
        Assumption.asserted(ledger.POWER_TAIL, f"a={a:g}, b={b:g}"),
        Assumption.verified(ledger.RADIUS_GATE, f"R={R:g}"),
        Assumption.verified(ledger.SQUARED_NORM_PENALTY, "regimes: large-n, reversed, middle"),
    ]
    params = {"n": n, "eps": eps, "d": d, "c": c, "a": a, "b": b, "R": R, "theta_star_norm": theta_star_norm}
    return make_certificate(TheoremId.SQUARED_NORM, components, assumptions, params)


class LocationEnvelope(NamedTuple):
    a: float
    b: float
    R: float
    center: np.ndarray
    c: float
    log_c: float
    s_p: float
    s_model: float


def location_family_envelope(family: ParametricFamily, theta_star, eps: float,
                             s_p: Optional[float] = None, median=None) -> LocationEnvelope:
    """
    Decay constants for a location family: a = 2(s_P + s_model), b = 1,
    R = 22(s_P + s_model) v 3 eps, Gaussian centre m_P - v, and
    c = (1/2d) min marginal density^2 within R + sqrt(d)(s_P + s_model) of the median.

    P defaults to the member at ``theta_star``; pass ``s_p`` and ``median`` for another P.
    ``c`` underflows to 0 for light tails, so ``log_c`` is returned as well.
    """
    if not isinstance(family, LocationFamily):
        raise PreconditionError("location family", family.name)
    _require_positive(eps=eps)
    theta_star = family.check_parameter(theta_star)
    s_model = family.first_central_moment
    s_p = s_model if s_p is None else float(s_p)
    median = family.marginal_median(theta_star) if median is None else np.asarray(median, dtype=float)
    d = family.dim
    spread = s_p + s_model
    R = max(22.0 * spread, 3.0 * eps)
    reach = R + math.sqrt(d) * spread
    offsets = np.linspace(-reach, reach, 2001)
    log_density = np.log(np.maximum([family.marginal_density(x) for x in offsets], np.finfo(float).tiny))
    log_c = 2.0 * float(np.min(log_density)) - math.log(2.0 * d)
    return LocationEnvelope(
        a=2.0 * spread,
        b=1.0,
        R=R,
        center=median - family.median_offset,
        c=math.exp(log_c),
        log_c=log_c,
        s_p=s_p,
        s_model=s_model,
    )


# ----------------------------------------------------------------- entropy


def entropy_certificate(
    resolvability: float,
    entropy: ExpectationLike,
    expected_penalty: ExpectationLike,
    n: int,
) -> BoundCertificate:
    """
    R + (2 H(theta_hat) - E L(theta_hat)) / n.

    ``entropy`` may be an exact value, a bound (log |grid| or estimator_entropy_bound) or a
    Monte Carlo plug-in estimate.
    """
    _require_n(n)
    h = Expectation.coerce(entropy)
    e_penalty = Expectation.coerce(expected_penalty)
    components = {
        "resolvability": float(resolvability),
        "entropy_term": 2.0 * h.value / n,
        "penalty_expectation_term": -e_penalty.value / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.for_expectation(ledger.ENTROPY_BOUND, h),
        Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty),
    ]
    return make_certificate(TheoremId.ENTROPY, components, assumptions, {"n": n}, expectations=[h, e_penalty])


def estimator_entropy_bound(eps: float, d: int, c: float, R: float) -> float:
    """
    (d/2)(4 sqrt(pi)/(eps sqrt(c)))^d + d log(1 + 2 [c^(-1/2) v R v 3 eps] / eps).

    @help.title Estimator Entropy Bound
    @help.description Bound on H(theta_hat) when P(||theta_hat - theta*|| >= r) decays like
    exp(-c r^2) beyond R (a hypothesis the caller asserts).
    @help.example
        estimator_entropy_bound(1.0, 1, 16.0, 0.0)  # 0.5 sqrt(pi) + log 7
    """
    _require_positive(eps=eps, c=c)
    if R < 0.0:
        raise ValueError("R must be non-negative")
    reach = max(1.0 / math.sqrt(c), R, 3.0 * eps)
    return 0.5 * d * (4.0 * SQRT_PI / (eps * math.sqrt(c))) ** d + d * math.log1p(2.0 * reach / eps)


def entropy_bound_within_3d(eps: float, d: int, c: float, R: float) -> bool:
    """
    Whether estimator_entropy_bound <= 3d.

    Guaranteed when eps sqrt(c) >= 4 sqrt(pi) and R <= max(3 eps, 1/sqrt(c)).
    """
    value = estimator_entropy_bound(eps, d, c, R)
    ok = value <= 3.0 * d
    if eps * math.sqrt(c) >= 4.0 * SQRT_PI and not ok:
        logger.info("entropy bound %.4g exceeds 3d at eps=%g, c=%g, R=%g", value, eps, c, R)
    return ok


# --------------------------------------------------------------- quadratic


def quadratic_certificate(
    eps: float,
    d: int,
    alpha: float,
    variance: ExpectationLike,
    expected_penalty: ExpectationLike,
    resolvability: float,
    n: int,
) -> BoundCertificate:
    """
    R + [2 d log(1 + 2 sqrt(pi)/(eps sqrt(alpha))) + alpha V(theta_hat) - E L(theta_hat)] / n,
    with V the trace of the covariance of theta_hat.
    """
    _require_n(n)
    _require_positive(eps=eps)
    if alpha <= 0.0:
        raise ValueError("alpha must be positive: the log term diverges at alpha = 0")
    v = Expectation.coerce(variance)
    if v.value < 0.0:
        raise ValueError("variance must be non-negative")
    e_penalty = Expectation.coerce(expected_penalty)
    components = {
        "resolvability": float(resolvability),
        "log_sum_term": 2.0 * d * math.log1p(2.0 * SQRT_PI / (eps * math.sqrt(alpha))) / n,
        "variance_term": alpha * v.value / n,
        "penalty_expectation_term": -e_penalty.value / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.verified(ledger.QUADRATIC_ALPHA, f"alpha={alpha:g}"),
        Assumption.for_expectation(ledger.VARIANCE, v),
        Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty),
    ]
    params = {"n": n, "eps": eps, "d": d, "alpha": alpha}
    return make_certificate(TheoremId.QUADRATIC, components, assumptions, params, expectations=[v, e_penalty])


# ---------------------------------------------------- penalty as pseudo-penalty


def penalty_pseudo_certificate(
    grid: EpsGrid,
    penalty: Penalty,
    alpha: float,
    expected_penalty: ExpectationLike,
    resolvability: float,
    n: int,
) -> BoundCertificate:
    """
    R + [2 log sum exp(-(alpha + 1) L / 2) + alpha E L(theta_hat)] / n.

    @help.title Penalty-as-Pseudo-Penalty Certificate
    @help.description With alpha = 1 and a MAP codelength penalty L = log(1/q) the sum is
    sum q = 1 and the value is R + E log(1/q(theta_hat)) / n (theorem id "map").
    @help.example
        penalty_pseudo_certificate(grid, CodelengthPenalty.uniform(grid, "map"), 1.0, math.log(101), 0.0, 100)
    """
    _require_n(n)
    if alpha < 0.0:
        raise ValueError("alpha must be non-negative")
    points = grid.enumerate_points()
    values = penalty.evaluate(points)
    e_penalty = Expectation.coerce(expected_penalty)
    is_map = isinstance(penalty, CodelengthPenalty) and penalty.mode == "map" and alpha == 1.0
    if is_map:
        theorem = TheoremId.MAP
        log_sum = 2.0 * math.log(math.fsum(penalty.pmf))
        extra = Assumption.verified(ledger.PRIOR_PMF, f"{penalty.pmf.size} points")
    else:
        theorem = TheoremId.PENALTY_PSEUDO
        log_sum = _twice_log_sum(-0.5 * (alpha + 1.0) * values)
        extra = Assumption.verified(ledger.PENALTY_ALPHA, f"alpha={alpha:g}")
    components = {
        "resolvability": float(resolvability),
        "log_sum_term": log_sum / n,
        "penalty_expectation_term": alpha * e_penalty.value / n,
    }
    assumptions = [
        Assumption.asserted(ledger.IID),
        Assumption.verified(ledger.COUNTABLE_MODEL, f"{points.shape[0]} grid points"),
        extra,
        Assumption.for_expectation(ledger.PENALTY_EXPECTATION, e_penalty),
    ]
    params = {"n": n, "eps": grid.eps, "d": grid.dim, "alpha": alpha}
    cert = make_certificate(theorem, components, assumptions, params, expectations=[e_penalty])
    return _warn_if_uninformative(cert)


# ------------------------------------------------------------ tail and nets


def tail_probability_bound(t: float, n: int, kraft_like_sum: float) -> float:
    """
    min(1, exp(-n t / 2) * sum) bounds P{D_B - [(1/n) sum log(p/p_theta_hat) + (L + pseudo)(theta_hat)/n] >= t}.

    @help.example
        tail_probability_bound(0.2, 100, 1.0)  # exp(-10) = 4.53999e-05
    """
    _require_n(n)
    if t < 0.0:
        raise ValueError("t must be non-negative")
    if kraft_like_sum < 0.0:
        raise ValueError("Kraft-like sum must be non-negative")
    if kraft_like_sum == 0.0:
        return 0.0
    return min(1.0, math.exp(-0.5 * n * t + math.log(kraft_like_sum)))


def kl_net_certificate(kl_radius: float, metric_entropy: float, n: int) -> BoundCertificate:
    """
    kl_radius + 2 M / n for a uniform twice-Kraft codelength over a KL-net of log-size M.
    """
    _require_n(n)
    if kl_radius < 0.0 or metric_entropy < 0.0:
        raise ValueError("KL radius and metric entropy must be non-negative")
    components = {"kl_radius": float(kl_radius), "metric_entropy_term": 2.0 * metric_entropy / n}
    assumptions = [
        Assumption.asserted(ledger.KL_NET, f"radius {kl_radius:g}"),
        Assumption.verified(ledger.TWICE_KRAFT, "uniform codelength over the net"),
    ]
    params = {"n": n, "metric_entropy": metric_entropy}
    return make_certificate(TheoremId.KL_NET, components, assumptions, params)
