"""
Randomized oracle checks for the supporting inequalities.

@help.category Verify
@help.title Lemma Suite
@help.description Each check draws random admissible inputs, evaluates both sides of one
inequality with exact or quadrature oracles and records the margin (right side minus left
side). A negative margin beyond rounding is a failure; its inputs are kept for replay. Check k
draws from the stream derived from (seed, k), so a ledger is reproducible from its seed.
@help.performance Grid-summation checks enumerate large lattice balls; they run at most
SUMMATION_TRIALS times regardless of the requested trial count.
@help.example
    ledger = lemma_suite(seed=1, trials=1000)
    ledger.total_failures  # 0
"""
import logging
import math
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import special, stats

from src.bounds.certificates import estimator_entropy_bound
from src.bounds.resolvability import resolvability_index, resolvability_taylor_bound
from src.estimator.penalty import SquaredNormPenalty, ZeroPenalty
from src.grid.lattice import EpsGrid
from src.grid.summation import (
    exact_tail_coefficient,
    gaussian_envelope,
    gaussian_lattice_sum,
    gaussian_sum_bound,
    oracle_radius,
    power_decay_envelope,
    power_decay_regime_bound,
    power_decay_summand,
    power_envelope,
    power_sum_bound,
    stirling_coefficient,
    tail_sum_integral_bound,
    truncated_grid_sum,
)
from src.models.base import Box
from src.models.divergences import gaussian_decay_constant
from src.models.exponential import BernoulliNatural, GaussianLocation
from src.models.location import LaplaceLocation
from src.utils.seeding import derive_rng

logger = logging.getLogger(__name__)

MARGIN_TOLERANCE = 1e-9
SUMMATION_TRIALS = 500
ORACLE_TRIALS = 100


class Trial(NamedTuple):
    margin: float
    scale: float
    inputs: Dict[str, Any]


class LemmaCheckRecord(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    check_id: str
    trials: int
    # @help.description Trials actually run; below requested_trials when the check is capped
    requested_trials: int
    failures: int
    worst_margin: float
    # @help.description Smallest (rhs - lhs) seen
    seed: int
    failing_inputs: List[Dict[str, Any]] = Field(default_factory=list)
    # @help.description Serialized inputs of every failing trial, for replay


class LemmaCheckLedger(BaseModel):
    """
    Results of one lemma_suite run.

    @help.title LemmaCheckLedger Model
    """

    model_config = ConfigDict(ser_json_inf_nan="strings")

    seed: int
    trials: int
    records: List[LemmaCheckRecord]

    @property
    def total_failures(self) -> int:
        return sum(r.failures for r in self.records)

    @property
    def passed(self) -> bool:
        return self.total_failures == 0

    def record(self, check_id: str) -> LemmaCheckRecord:
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _two_sided(value: float, low: float, high: float) -> float:
    return min(value - low, high - value)


# ------------------------------------------------------------ elementary


def check_squared_norm(rng: np.random.Generator) -> Trial:
    """||u - v||^2 <= 2||u||^2 + 2||v||^2."""
    d = int(rng.integers(1, 6))
    scale = 10.0 ** rng.uniform(-2, 2)
    u = rng.normal(size=d) * scale
    v = rng.normal(size=d) * scale
    lhs = float(np.sum((u - v) ** 2))
    rhs = 2.0 * float(u @ u) + 2.0 * float(v @ v)
    return Trial(rhs - lhs, rhs, {"u": u, "v": v})


def check_quadratic_form(rng: np.random.Generator) -> Trial:
    """lambda_min <= v'Mv / ||v||^2 <= lambda_max."""
    d = int(rng.integers(1, 6))
    a = rng.normal(size=(d, d))
    m = 0.5 * (a + a.T)
    v = rng.normal(size=d)
    ratio = float(v @ m @ v) / float(v @ v)
    eigs = np.linalg.eigvalsh(m)
    return Trial(_two_sided(ratio, eigs[0], eigs[-1]), float(np.max(np.abs(eigs))), {"M": m, "v": v})


def check_log_sum(rng: np.random.Generator) -> Trial:
    """a_k >= 1/K implies log sum a <= sum log a + K log K."""
    k = int(rng.integers(1, 11))
    a = 1.0 / k + rng.exponential(10.0 ** rng.uniform(-2, 1), size=k)
    lhs = math.log(math.fsum(a))
    rhs = math.fsum(np.log(a)) + k * math.log(k)
    return Trial(rhs - lhs, abs(lhs), {"a": a})


_SKEWED = ("gamma", "lognorm", "weibull_min", "norm", "laplace")


def _random_marginal(rng: np.random.Generator):
    kind = _SKEWED[int(rng.integers(len(_SKEWED)))]
    loc = rng.uniform(-3, 3)
    scale = rng.uniform(0.5, 3.0)
    if kind == "gamma":
        shape = rng.uniform(0.3, 5.0)
        return stats.gamma(shape, loc=loc, scale=scale), (kind, shape, loc, scale)
    if kind == "lognorm":
        shape = rng.uniform(0.2, 1.0)
        return stats.lognorm(shape, loc=loc, scale=scale), (kind, shape, loc, scale)
    if kind == "weibull_min":
        shape = rng.uniform(0.5, 3.0)
        return stats.weibull_min(shape, loc=loc, scale=scale), (kind, shape, loc, scale)
    return getattr(stats, kind)(loc=loc, scale=scale), (kind, None, loc, scale)


def check_median_mean(rng: np.random.Generator) -> Trial:
    """
    ||m_P - EX|| <= sqrt(d) E||X - EX|| for independent marginals.

    E||X - EX|| is replaced by the smaller ||(E|X_j - EX_j|)_j||, which only tightens the check.
    """
    d = int(rng.integers(1, 4))
    gaps, deviations, marginals = [], [], []
    for _ in range(d):
        dist, params = _random_marginal(rng)
        mean = float(dist.mean())
        gaps.append(float(dist.median()) - mean)
        deviations.append(float(dist.expect(lambda x, mu=mean: abs(x - mu))))
        marginals.append(params)
    lhs = float(np.linalg.norm(gaps))
    rhs = math.sqrt(d) * float(np.linalg.norm(deviations))
    return Trial(rhs - lhs, rhs, {"marginals": marginals})


# ------------------------------------------------------------- curvature


def _bernoulli_curvature_range(lo: float, hi: float) -> Tuple[float, float]:
    """(min, max) of p(1-p) over [lo, hi]."""
    def curv(t: float) -> float:
        p = special.expit(t)
        return float(p * (1.0 - p))

    ends = (curv(lo), curv(hi))
    return min(ends), curv(min(max(0.0, lo), hi))


def check_jensen_difference(rng: np.random.Generator) -> Trial:
    """inf lambda_min V/2 <= E f(Y) - f(EY) <= sup lambda_max V/2 for discrete Y."""
    kind = ("quadratic", "gaussian-psi", "bernoulli-psi")[int(rng.integers(3))]
    k = int(rng.integers(2, 7))
    weights = rng.dirichlet(np.ones(k))
    if kind == "bernoulli-psi":
        support = rng.uniform(-4, 4, size=(k, 1))
        values = BernoulliNatural(1).log_partition(support)
        mean = weights @ support
        at_mean = float(BernoulliNatural(1).log_partition(mean[None, :])[0])
        low, high = _bernoulli_curvature_range(float(support.min()), float(support.max()))
    else:
        d = int(rng.integers(1, 5))
        support = rng.normal(size=(k, d)) * 2.0
        mean = weights @ support
        if kind == "gaussian-psi":
            family = GaussianLocation(min(d, 3))
            support, mean = support[:, : family.dim], mean[: family.dim]
            values = family.log_partition(support)
            at_mean = float(family.log_partition(mean[None, :])[0])
            low = high = 1.0
        else:
            a = rng.normal(size=(d, d))
            m = 0.5 * (a + a.T)
            b = rng.normal(size=d)
            values = 0.5 * np.einsum("ij,jk,ik->i", support, m, support) + support @ b
            at_mean = 0.5 * float(mean @ m @ mean) + float(b @ mean)
            eigs = np.linalg.eigvalsh(m)
            low, high = float(eigs[0]), float(eigs[-1])
    gap = float(weights @ values) - at_mean
    spread = float(weights @ np.sum((support - mean) ** 2, axis=1))
    margin = _two_sided(gap, low * spread / 2.0, high * spread / 2.0)
    return Trial(margin, max(1.0, abs(high) * spread), {"kind": kind, "support": support, "weights": weights})


def check_grid_infimum(rng: np.random.Generator) -> Trial:
    """inf over the grid of f <= f(theta) + (delta^2/2) sup lambda_max(Hess f)_+, delta = eps sqrt(d)."""
    d = int(rng.integers(1, 4))
    eps = rng.uniform(0.05, 1.0)
    lattice = EpsGrid.lattice(d, eps, rng.uniform(0, eps, size=d))
    a = rng.normal(size=(d, d))
    m = 0.5 * (a + a.T)
    b = rng.normal(size=d)
    amp = rng.uniform(0, 1)
    omega = rng.uniform(0.5, 3.0)

    def f(points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        quad = 0.5 * np.einsum("ij,jk,ik->i", points, m, points)
        return quad + points @ b + amp * np.sum(np.sin(omega * points), axis=1)

    theta = rng.normal(size=d) * 3.0
    delta = eps * math.sqrt(d)
    nearby = lattice.points_near(theta, delta * (1.0 + 1e-9))
    lhs = float(np.min(f(nearby)))
    # Weyl: lambda_max(M - amp omega^2 diag(sin)) <= lambda_max(M) + amp omega^2
    curvature = float(np.linalg.eigvalsh(m)[-1]) + amp * omega * omega
    rhs = float(f(theta)[0]) + 0.5 * delta * delta * max(curvature, 0.0)
    return Trial(rhs - lhs, max(1.0, abs(rhs)), {"eps": eps, "theta": theta, "M": m, "b": b, "amp": amp, "omega": omega})


# -------------------------------------------------------------- affinity


def _location_family(rng: np.random.Generator, max_dim: Optional[int] = None):
    if rng.random() < 0.5:
        return GaussianLocation(int(rng.integers(1, (max_dim or 3) + 1)))
    return LaplaceLocation(int(rng.integers(1, min(max_dim or 2, 2) + 1)))


def check_affinity_cauchy_schwarz(rng: np.random.Generator) -> Trial:
    """A(P, Q) <= sqrt(P H Q H) + sqrt(P H^c Q H^c) for half-lines H = (-inf, h] or H = {1}."""
    kind = int(rng.integers(3))
    if kind == 2:
        family = BernoulliNatural(1)
        ta, tb = rng.uniform(-4, 4, size=2)
        p_h, q_h = float(special.expit(ta)), float(special.expit(tb))
        event = "{1}"
    else:
        family = GaussianLocation(1) if kind == 0 else LaplaceLocation(1)
        ta, tb = rng.uniform(-3, 3, size=2)
        h = rng.uniform(-5, 5)
        p_h, q_h = family.marginal_cdf(h - ta), family.marginal_cdf(h - tb)
        event = f"(-inf, {h}]"
    lhs = family.hellinger_affinity([ta], [tb])
    rhs = math.sqrt(p_h * q_h) + math.sqrt((1.0 - p_h) * (1.0 - q_h))
    return Trial(rhs - lhs, 1.0, {"family": family.name, "theta_a": ta, "theta_b": tb, "event": event})


def check_first_moments(rng: np.random.Generator) -> Trial:
    """A(P, Q) <= 2(s_P + s_Q) / ||EX - EY|| for location families."""
    family = _location_family(rng)
    d = family.dim
    ta = rng.normal(size=d) * rng.uniform(0, 5)
    tb = rng.normal(size=d) * rng.uniform(0, 5)
    distance = float(np.linalg.norm(ta - tb))
    lhs = family.hellinger_affinity(ta, tb)
    rhs = 4.0 * family.first_central_moment / distance if distance > 0 else math.inf
    return Trial(min(rhs - lhs, 1.0), 1.0, {"family": family.name, "d": d, "theta_a": ta, "theta_b": tb})


def check_median_affinity(rng: np.random.Generator) -> Trial:
    """A(P, Q) <= exp(-z^2/2), z the Q probability between the medians."""
    family = GaussianLocation(1) if rng.random() < 0.5 else LaplaceLocation(1)
    tp, tq = rng.uniform(-4, 4, size=2)
    z = abs(family.marginal_cdf(tp - tq) - 0.5)
    lhs = family.hellinger_affinity([tp], [tq])
    rhs = math.exp(-0.5 * z * z)
    return Trial(rhs - lhs, 1.0, {"family": family.name, "theta_p": tp, "theta_q": tq, "z": z})


def check_marginal_median_affinity(rng: np.random.Generator) -> Trial:
    """A(P, Q) <= exp(-c ||m_Q - m_P||^2), c = (1/2d) min over [m_Q - R, m_Q + R] of q_j^2."""
    family = _location_family(rng)
    d = family.dim
    tp = rng.normal(size=d)
    tq = tp + rng.normal(size=d) * rng.uniform(0, 4.0 / math.sqrt(d))
    distance = float(np.linalg.norm(family.marginal_median(tq) - family.marginal_median(tp)))
    radius = distance * rng.uniform(1.0, 2.0)
    offsets = np.linspace(-radius, radius, 201)
    floor = min(family.marginal_density(x) for x in offsets)
    c = floor * floor / (2.0 * d)
    lhs = family.hellinger_affinity(tp, tq)
    rhs = math.exp(-c * distance * distance)
    return Trial(rhs - lhs, 1.0, {"family": family.name, "d": d, "theta_p": tp, "theta_q": tq, "R": radius})


def check_gaussian_affinity_bound(rng: np.random.Generator) -> Trial:
    """A(P_a, P_b) <= exp(-c ||a - b||^2) with c from the curvature of psi."""
    if rng.random() < 0.5:
        family = GaussianLocation(int(rng.integers(1, 4)))
        domain = Box.unbounded(family.dim)
        ta, tb = rng.normal(size=(2, family.dim)) * 3.0
    else:
        family = BernoulliNatural(1)
        half = rng.uniform(0.5, 4.0)
        domain = Box.cube(1, -half, half)
        ta, tb = rng.uniform(-half, half, size=(2, 1))
    c = gaussian_decay_constant(family, domain)
    lhs = family.hellinger_affinity(ta, tb)
    rhs = math.exp(-c * float(np.sum((ta - tb) ** 2)))
    return Trial(rhs - lhs, 1.0, {"family": family.name, "theta_a": ta, "theta_b": tb, "c": c})


# ----------------------------------------------------------- resolvability


def check_taylor_bound(rng: np.random.Generator) -> Trial:
    """Enumerated resolvability index <= its Taylor bound at theta* in the grid hull."""
    if rng.random() < 0.5:
        family = GaussianLocation(int(rng.integers(1, 3)))
    else:
        family = BernoulliNatural(1)
    d = family.dim
    eps = rng.uniform(0.05, 0.5)
    grid = EpsGrid.create(rng.uniform(0, eps, size=d), eps, Box.cube(d, -2.0, 2.0))
    hull = grid.hull()
    theta_star = rng.uniform(hull.lower_array(), hull.upper_array())
    penalty = SquaredNormPenalty() if rng.random() < 0.5 else ZeroPenalty()
    n = int(rng.integers(1, 201))
    lhs = resolvability_index(family, grid, penalty, theta_star, n).value
    rhs = resolvability_taylor_bound(family, theta_star, theta_star, penalty, eps, n, grid)
    return Trial(rhs - lhs, max(1.0, rhs), {
        "family": family.name, "d": d, "eps": eps, "offset": list(grid.offset),
        "theta_star": theta_star, "penalty": penalty.kind, "n": n,
    })


# --------------------------------------------------------------- entropy


def _entropy(q: np.ndarray) -> float:
    q = q[q > 0]
    return float(-math.fsum(q * np.log(q)))


def _subprobability(rng: np.random.Generator, low: int, high: int) -> np.ndarray:
    k = int(rng.integers(low, high + 1))
    return rng.dirichlet(np.ones(k) * rng.uniform(0.1, 3.0)) * rng.uniform(0.01, 1.0)


def check_entropy_extension(rng: np.random.Generator) -> Trial:
    """H(Q) = Q(X) H(Q~) + Q(X) log(1/Q(X)) for a finite measure Q."""
    q = _subprobability(rng, 1, 20)
    mass = math.fsum(q)
    identity = mass * _entropy(q / mass) + mass * math.log(1.0 / mass)
    return Trial(-abs(_entropy(q) - identity), max(1.0, identity), {"q": q})


def check_entropy_extension_inequality(rng: np.random.Generator) -> Trial:
    """H(Q) <= H(Q~) + 1/e for a subprobability Q."""
    q = _subprobability(rng, 1, 20)
    lhs = _entropy(q)
    rhs = _entropy(q / math.fsum(q)) + math.exp(-1.0)
    return Trial(rhs - lhs, max(1.0, rhs), {"q": q})


def check_entropy_extension_size(rng: np.random.Generator) -> Trial:
    """H(Q) <= log |X| for a subprobability Q on |X| >= 3 points."""
    q = _subprobability(rng, 3, 30)
    rhs = math.log(q.size)
    return Trial(rhs - _entropy(q), rhs, {"q": q})


def check_estimator_entropy(rng: np.random.Generator) -> Trial:
    """
    H(theta_hat) <= estimator_entropy_bound when P(theta) <= exp(-c ||theta - theta*||^2)
    outside B(theta*, R); R is the smallest radius for which the hypothesis is verified.
    """
    d = int(rng.integers(1, 3))
    eps = rng.uniform(0.2, 1.0)
    c = rng.uniform(0.2, 4.0)
    theta_star = rng.normal(size=d)
    half = 6.0 / math.sqrt(c) + 3.0 * eps
    grid = EpsGrid.create(rng.uniform(0, eps, size=d), eps, Box(
        lower=tuple(theta_star - half), upper=tuple(theta_star + half)))
    points = grid.enumerate_points()
    dist2 = np.sum((points - theta_star) ** 2, axis=1)
    log_w = -rng.uniform(0.3, 3.0) * c * dist2
    q = np.exp(log_w - special.logsumexp(log_w))
    violating = q > np.exp(-c * dist2)
    radius = float(np.sqrt(dist2[violating].max())) * (1.0 + 1e-9) if np.any(violating) else 0.0
    lhs = _entropy(q)
    rhs = estimator_entropy_bound(eps, d, c, radius)
    return Trial(rhs - lhs, max(1.0, rhs), {"d": d, "eps": eps, "c": c, "theta_star": theta_star, "R": radius})


# ------------------------------------------------------------ grid sums


def _gaussian_sum(rng: np.random.Generator, on_lattice: bool) -> Trial:
    d = int(rng.integers(1, 4))
    eps = rng.uniform(0.1, 2.0)
    c = rng.uniform(0.05, 5.0)
    offset = rng.uniform(0, eps, size=d)
    if on_lattice:
        center = offset + eps * rng.integers(-5, 6, size=d)
    else:
        center = rng.normal(size=d) * 3.0
    oracle = gaussian_lattice_sum(eps, c, d, center, offset).upper
    bound = gaussian_sum_bound(eps, c, d, off_center=not on_lattice)
    return Trial(bound - oracle, bound, {"d": d, "eps": eps, "c": c, "center": center, "offset": offset})


def check_gaussian_summation(rng: np.random.Generator) -> Trial:
    """Lattice sum of exp(-c ||theta - v||^2), v on the lattice, <= (1 + sqrt(pi)/(eps sqrt c))^d."""
    return _gaussian_sum(rng, on_lattice=True)


def check_gaussian_summation_off_center(rng: np.random.Generator) -> Trial:
    """Same sum for any peak <= (1 + 2 sqrt(pi)/(eps sqrt c))^d."""
    return _gaussian_sum(rng, on_lattice=False)


def _tail_setup(rng: np.random.Generator):
    d = int(rng.integers(1, 4))
    eps = rng.uniform(0.1, 1.0)
    radius = 3.0 * eps * rng.uniform(1.0, 4.0)
    center = rng.normal(size=d)
    lattice = EpsGrid.lattice(d, eps, rng.uniform(0, eps, size=d))
    return d, eps, radius, center, lattice


def check_tail_summation(rng: np.random.Generator) -> Trial:
    """
    Sum of g(||theta - theta*||) outside B(theta*, R) <= Gamma-coefficient integral <= Stirling form.
    """
    d, eps, radius, center, lattice = _tail_setup(rng)
    if rng.random() < 0.5:
        c = rng.uniform(0.05, 2.0)
        envelope = gaussian_envelope(c)
        reach = oracle_radius(eps, radius, c, d)
    else:
        envelope = power_envelope(rng.uniform(d + 1.0, d + 5.0))
        reach = oracle_radius(eps, radius, None, d)
    bound = tail_sum_integral_bound(envelope, eps, d, radius)
    oracle = truncated_grid_sum(
        lambda p: envelope(np.linalg.norm(p - center, axis=1)), reach, lattice, center, envelope, inner_radius=radius
    ).upper
    coefficient_order = stirling_coefficient(eps, d) - exact_tail_coefficient(eps, d)
    margin = min(bound.exact_gamma - oracle, bound.stirling - bound.exact_gamma, coefficient_order)
    return Trial(margin, max(1.0, bound.exact_gamma), {
        "d": d, "eps": eps, "R": radius, "center": center, "envelope": envelope.label,
    })


def check_power_summation(rng: np.random.Generator) -> Trial:
    """Sum of ||theta - theta*||^-q outside B(theta*, R) <= (20/(eps sqrt d))^d (4/R)^(q-d)/(q-d)."""
    d, eps, radius, center, lattice = _tail_setup(rng)
    q = rng.uniform(d + 0.5, d + 4.0)
    envelope = power_envelope(q)
    oracle = truncated_grid_sum(
        lambda p: envelope(np.linalg.norm(p - center, axis=1)),
        oracle_radius(eps, radius, None, d), lattice, center, envelope, inner_radius=radius,
    ).upper
    bound = power_sum_bound(eps, d, radius, q)
    return Trial(bound - oracle, max(1.0, bound), {"d": d, "eps": eps, "R": radius, "q": q, "center": center})


POWER_DECAY_REGIMES = ("large-n", "reversed", "middle")


def check_power_decay(rng: np.random.Generator, regime: Optional[str] = None) -> Trial:
    """
    Sum over ||theta - theta*|| >= R of exp(-kappa ||theta||^2)(a/||theta - theta*||^b)^(alpha n)
    is at most every applicable regime bound.
    """
    if regime is None:
        regime = POWER_DECAY_REGIMES[int(rng.integers(3))]
    d = 2 if regime == "reversed" else int(rng.integers(1, 3))
    eps = rng.uniform(0.1, 1.0)
    alpha = float(rng.choice([0.5, 1.0]))
    a = rng.uniform(0.2, 1.0)
    kappa = rng.uniform(0.1, 2.0)
    if regime == "large-n":
        x = rng.uniform(d + 1.0, d + 6.0)
        if rng.random() < 0.5:
            kappa = 0.0
    elif regime == "reversed":
        x = rng.uniform(0.2, d - 1.0)
    else:
        x = rng.uniform(max(d - 1.0, 0.2), d + 1.0)
    n = int(rng.integers(1, 31))
    b = x / (n * alpha)
    theta_star = rng.normal(size=d) * rng.uniform(0, 1)
    norm = float(np.linalg.norm(theta_star))
    radius = max(4.0 * a ** (1.0 / b), 3.0 * eps) * rng.uniform(1.05, 3.0)

    bound = power_decay_regime_bound(eps, d, radius, a, b, alpha, n, kappa, norm)
    lattice = EpsGrid.lattice(d, eps, rng.uniform(0, eps, size=d))
    envelope = power_decay_envelope(a, b, alpha, n, kappa, norm)
    oracle = truncated_grid_sum(
        lambda p: power_decay_summand(p, theta_star, a, b, alpha, n, kappa),
        oracle_radius(eps, radius, None, d), lattice, theta_star, envelope, inner_radius=radius,
    ).upper
    margin = min(value - oracle for value in bound.candidates.values())
    return Trial(margin, max(1.0, oracle), {
        "regime": regime, "d": d, "eps": eps, "a": a, "b": b, "alpha": alpha, "n": n,
        "kappa": kappa, "theta_star": theta_star, "R": radius, "candidates": bound.candidates,
    })


# ------------------------------------------------------------------ suite


CheckFunc = Callable[[np.random.Generator], Trial]

CHECKS: Dict[str, Tuple[CheckFunc, Optional[int]]] = {
    "squared-norm": (check_squared_norm, None),
    "quadratic-form": (check_quadratic_form, None),
    "log-sum": (check_log_sum, None),
    "median-mean": (check_median_mean, None),
    "jensen-difference": (check_jensen_difference, None),
    "grid-infimum": (check_grid_infimum, None),
    "affinity-cauchy-schwarz": (check_affinity_cauchy_schwarz, None),
    "affinity-first-moments": (check_first_moments, None),
    "affinity-median": (check_median_affinity, None),
    "affinity-marginal-median": (check_marginal_median_affinity, None),
    "exponential-affinity-gaussian": (check_gaussian_affinity_bound, None),
    "resolvability-taylor": (check_taylor_bound, ORACLE_TRIALS),
    "entropy-extension": (check_entropy_extension, None),
    "entropy-extension-inequality": (check_entropy_extension_inequality, None),
    "entropy-extension-size": (check_entropy_extension_size, None),
    "estimator-entropy": (check_estimator_entropy, ORACLE_TRIALS),
    "gaussian-summation": (check_gaussian_summation, SUMMATION_TRIALS),
    "gaussian-summation-off-center": (check_gaussian_summation_off_center, SUMMATION_TRIALS),
    "tail-summation": (check_tail_summation, SUMMATION_TRIALS),
    "power-summation": (check_power_summation, SUMMATION_TRIALS),
    "power-decay": (check_power_decay, SUMMATION_TRIALS),
}


def run_check(check_id: str, seed: int, trials: int, index: Optional[int] = None) -> LemmaCheckRecord:
    """Runs one registered check; ``index`` selects the derived stream (default: registry position)."""
    check, cap = CHECKS[check_id]
    if index is None:
        index = list(CHECKS).index(check_id)
    rng = derive_rng(seed, index)
    count = min(trials, cap) if cap is not None else trials
    if count < trials:
        logger.warning("%s: running %d of %d requested trials (cap)", check_id, count, trials)
    failures, worst = 0, math.inf
    failing: List[Dict[str, Any]] = []
    for trial_number in range(count):
        try:
            trial = check(rng)
        except Exception as exc:
            failures += 1
            failing.append({"trial": trial_number, "error": f"{type(exc).__name__}: {exc}"})
            logger.error("%s trial %d raised %s", check_id, trial_number, exc)
            continue
        worst = min(worst, trial.margin)
        if trial.margin < -MARGIN_TOLERANCE * max(1.0, abs(trial.scale)):
            failures += 1
            failing.append({"trial": trial_number, "margin": trial.margin, **_jsonable(trial.inputs)})
    logger.info("%s: %d trials, %d failures, worst margin %.3g", check_id, count, failures, worst)
    return LemmaCheckRecord(
        check_id=check_id, trials=count, requested_trials=trials, failures=failures, worst_margin=worst,
        seed=seed, failing_inputs=failing,
    )


def lemma_suite(seed: int, trials: int) -> LemmaCheckLedger:
    """
    Runs every registered check.

    @help.title lemma_suite Function
    @help.description trials >= 1. Summation-heavy checks are capped at SUMMATION_TRIALS.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records = [run_check(check_id, seed, trials, index) for index, check_id in enumerate(CHECKS)]
    return LemmaCheckLedger(seed=seed, trials=trials, records=records)
