"""
Lattice summation bounds.

@help.category Grid
@help.title Grid Summation Bounds
@help.description Closed-form bounds on sums of Gaussian-shaped and power-decay functions over
eps-lattices, and the brute-force oracle (truncated_grid_sum) that checks them. The oracle adds
an analytic remainder for everything outside the truncation radius, so "sum + tail <= bound"
is a sound comparison rather than a sampled one.
@help.performance Gaussian sums factor over coordinates; the oracle sums each axis separately.
"""
import logging
import math
from typing import Callable, Dict, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate, special

from src.grid.lattice import EpsGrid
from src.utils.errors import PreconditionError
from src.utils.numerics import fsum

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


class GridSum(NamedTuple):
    total: float
    tail: float

    @property
    def upper(self) -> float:
        return self.total + self.tail


class TailSumBound(NamedTuple):
    exact_gamma: float
    stirling: float
    integral: float


class RegimeBound(NamedTuple):
    value: float
    regime: str
    candidates: Dict[str, float]


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


# ---------------------------------------------------------------- envelopes


class RadialEnvelope:
    """
    Non-increasing g: [0, inf) -> [0, inf) with tail moments M_k(a) = int_a^inf s^k g(s) ds.

    @help.title Radial Envelope
    @help.description Dominates a summand outside a radius; supplies the moments needed for
    analytic tail remainders. Moments are analytic for the built-in shapes and fall back to
    adaptive quadrature otherwise.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        moment: Optional[Callable[[int, float], float]] = None,
        label: str = "custom",
    ):
        self._func = func
        self._moment = moment
        self.label = label

    def __repr__(self) -> str:
        return f"RadialEnvelope({self.label})"

    def __call__(self, r):
        return self._func(np.asarray(r, dtype=float))

    def moment(self, k: int, a: float) -> float:
        a = max(float(a), 0.0)
        if self._moment is not None:
            return float(self._moment(k, a))
        value, error = integrate.quad(
            lambda s: s**k * float(self._func(np.asarray(s))), a, np.inf, epsabs=0.0, epsrel=1e-10, limit=200
        )
        return float(value + error)

    @classmethod
    def zero(cls) -> "RadialEnvelope":
        return cls(lambda r: np.zeros_like(r, dtype=float), lambda k, a: 0.0, "zero")


def gaussian_envelope(c: float, scale: float = 1.0) -> RadialEnvelope:
    """g(s) = scale * exp(-c s^2)."""
    _require_positive(c=c)

    def moment(k: int, a: float) -> float:
        p = (k + 1) / 2.0
        return scale * 0.5 * c ** (-p) * special.gamma(p) * special.gammaincc(p, c * a * a)

    return RadialEnvelope(lambda r: scale * np.exp(-c * r * r), moment, f"gaussian(c={c:g})")


def power_envelope(q: float, scale: float = 1.0) -> RadialEnvelope:
    """g(s) = scale * s^(-q)."""
    _require_positive(q=q)

    def func(r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return scale * np.where(r > 0, np.power(np.maximum(r, 1e-300), -q), np.inf)

    def moment(k: int, a: float) -> float:
        if q <= k + 1 or a <= 0.0:
            return math.inf
        return scale * a ** (k + 1 - q) / (q - k - 1)

    return RadialEnvelope(func, moment, f"power(q={q:g})")


def power_decay_envelope(a: float, b: float, alpha: float, n: int, kappa: float = 0.0,
                         theta_star_norm: float = 0.0) -> RadialEnvelope:
    """
    Radial bound on exp(-kappa ||theta||^2) (a / ||theta - theta*||^b)^(alpha n).

    Uses ||theta||^2 >= ||theta - theta*||^2 / 2 - ||theta*||^2.
    """
    q = b * alpha * n
    log_scale = alpha * n * math.log(a) + kappa * theta_star_norm**2
    if kappa == 0.0:
        return power_envelope(q, math.exp(log_scale))

    def func(r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            logs = log_scale - 0.5 * kappa * r * r - q * np.log(np.maximum(r, 1e-300))
        return np.where(r > 0, np.exp(logs), np.inf)

    return RadialEnvelope(func, None, f"power-decay(q={q:g}, kappa={kappa:g})")


# ------------------------------------------------------------ closed forms


def gaussian_sum_bound(eps: float, c: float, d: int, off_center: bool = False) -> float:
    """
    Bound on the lattice sum of exp(-c ||theta - v||^2).

    @help.title Gaussian Summation Bound
    @help.description (1 + sqrt(pi)/(eps sqrt(c)))^d when the peak v is a lattice point, and
    (1 + 2 sqrt(pi)/(eps sqrt(c)))^d for an arbitrary peak.
    @help.example
        gaussian_sum_bound(1.0, 1.0, 1)  # 2.772454
    """
    _require_positive(eps=eps, c=c)
    if d < 1:
        raise ValueError("dimension must be positive")
    k = 2.0 if off_center else 1.0
    return (1.0 + k * SQRT_PI / (eps * math.sqrt(c))) ** d


def stirling_coefficient(eps: float, d: int) -> float:
    """(20 / (eps sqrt(d)))^d."""
    return (20.0 / (eps * math.sqrt(d))) ** d


def exact_tail_coefficient(eps: float, d: int) -> float:
    """2 pi^(d/2) / ((eps/4)^d Gamma(d/2))."""
    return 2.0 * math.pi ** (d / 2.0) / ((eps / 4.0) ** d * math.gamma(d / 2.0))


def tail_sum_integral_bound(envelope: RadialEnvelope, eps: float, d: int, R: float) -> TailSumBound:
    """
    Bound on the sum of g(||theta - theta*||) over grid points outside B(theta*, R).

    @help.title Tail Summation Bound
    @help.description Reduces the lattice tail to int_{R/4}^inf g(r) r^(d-1) dr, with the exact
    Gamma-function coefficient and its Stirling simplification (20/(eps sqrt d))^d. Needs R >= 3 eps.
    @help.example
        tail_sum_integral_bound(power_envelope(3), 1.0, 1, 3.0).stirling  # 17.778
    """
    _require_positive(eps=eps, R=R)
    if R < 3.0 * eps:
        raise PreconditionError("R >= 3 eps", f"R={R:g}, eps={eps:g}")
    integral = envelope.moment(d - 1, R / 4.0)
    return TailSumBound(
        exact_gamma=exact_tail_coefficient(eps, d) * integral,
        stirling=stirling_coefficient(eps, d) * integral,
        integral=integral,
    )


def power_sum_bound(eps: float, d: int, R: float, q: float) -> float:
    """
    Bound on the sum of ||theta - theta*||^(-q) outside B(theta*, R).

    (20/(eps sqrt d))^d (4/R)^(q-d) / (q-d); requires q > d and R >= 3 eps.
    """
    _require_positive(eps=eps, R=R)
    if q <= d:
        raise PreconditionError("q > d", f"q={q:g}, d={d}: the sum diverges")
    if R < 3.0 * eps:
        raise PreconditionError("R >= 3 eps", f"R={R:g}, eps={eps:g}")
    return stirling_coefficient(eps, d) * (4.0 / R) ** (q - d) / (q - d)


def power_decay_regime_bound(
    eps: float,
    d: int,
    R: float,
    a: float,
    b: float,
    alpha: float,
    n: int,
    kappa: float = 0.0,
    theta_star_norm: float = 0.0,
) -> RegimeBound:
    """
    Bound on the sum over ||theta - theta*|| >= R of exp(-kappa ||theta||^2)(a/||theta - theta*||^b)^(alpha n).

    @help.title Power-Decay Regime Bound
    @help.description Dispatches on n alpha b against d - 1 and d + 1: the large-n bound needs no
    Gaussian factor; the reversed and middle bounds need kappa > 0. On a regime boundary every
    applicable bound is computed and the minimum returned.
    @help.example
        power_decay_regime_bound(0.1, 1, 12.0, 1.0, 1.0, 0.5, 100).value  # 64.76
    """
    _require_positive(eps=eps, R=R, a=a, b=b, alpha=alpha)
    if alpha > 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if n < 1:
        raise ValueError("sample size n must be >= 1")
    if kappa < 0.0:
        raise ValueError("kappa must be non-negative")
    radius_floor = 4.0 * a ** (1.0 / b)
    if R < radius_floor or R < 3.0 * eps:
        raise PreconditionError("R >= 4 a^(1/b) v 3 eps", f"R={R:g}, 4a^(1/b)={radius_floor:g}, 3eps={3 * eps:g}")

    x = n * alpha * b
    tol = 1e-12 * max(1.0, x)
    candidates: Dict[str, float] = {}

    if x >= d + 1 - tol:
        log_ratio = math.log(R / radius_floor)
        if log_ratio > 0.0:
            candidates["large-n"] = (4.0 * R / (eps * math.sqrt(x * log_ratio))) ** d
        else:
            candidates["large-n"] = math.inf
    if kappa > 0.0:
        weight = math.exp(kappa * theta_star_norm**2)
        if x <= d - 1 + tol:
            inner = math.sqrt(max(d, a ** (2.0 / b) * kappa))
            candidates["reversed"] = 2.0 * weight * (
                4.0 * math.sqrt(2.0 * math.pi * math.e) * inner / (eps * math.sqrt(x * kappa))
            ) ** d
        if d - 1 - tol <= x <= d + 1 + tol:
            candidates["middle"] = weight * (20.0 / (eps * math.sqrt(x))) ** d * (22.0 / R**3 + 2.0 * math.sqrt(kappa))

    if not candidates:
        raise PreconditionError(
            "kappa > 0 when n < (d+1)/(alpha b)",
            f"n={n}, (d+1)/(alpha b)={(d + 1) / (alpha * b):g}; a squared-norm penalty supplies kappa",
        )
    regime = min(candidates, key=candidates.get)
    return RegimeBound(candidates[regime], regime, candidates)


def power_decay_summand(points: np.ndarray, theta_star: np.ndarray, a: float, b: float, alpha: float,
                        n: int, kappa: float = 0.0) -> np.ndarray:
    """exp(-kappa ||theta||^2) (a / ||theta - theta*||^b)^(alpha n), evaluated in log space."""
    points = np.atleast_2d(points)
    dist = np.linalg.norm(points - theta_star, axis=1)
    with np.errstate(divide="ignore"):
        logs = alpha * n * (math.log(a) - b * np.log(dist)) - kappa * np.sum(points * points, axis=1)
    return np.exp(logs)


# ------------------------------------------------------------------ oracle


def lattice_tail_bound(envelope: RadialEnvelope, eps: float, d: int, radius: float) -> float:
    """
    Bound on the sum of g(||theta - c||) over all lattice points with ||theta - c|| >= radius.

    d = 1: each side contributes at most g(radius) + (1/eps) int_radius^inf g.
    d > 1: each point is dominated by the average of g(||y - c|| - delta) over its own cell,
    delta = eps sqrt(d)/2, giving eps^-d S_d int_{radius - delta}^inf g(r - delta) r^(d-1) dr.
    """
    if radius <= 0.0:
        raise ValueError("tail radius must be positive")
    if d == 1:
        return 2.0 * (float(envelope(np.asarray(radius))) + envelope.moment(0, radius) / eps)

    delta = 0.5 * eps * math.sqrt(d)
    surface = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    r0 = max(radius - delta, 0.0)
    total = 0.0
    if r0 < delta:
        # region where r - delta < 0: g is at most g(0)
        peak = float(envelope(np.asarray(0.0)))
        if peak > 0.0:
            total += peak * (delta**d - r0**d) / d
        r0 = delta
    s0 = r0 - delta
    for k in range(d):
        total += math.comb(d - 1, k) * delta ** (d - 1 - k) * envelope.moment(k, s0)
    return surface * total / eps**d


def truncated_grid_sum(
    func: Callable[[np.ndarray], np.ndarray],
    radius: float,
    grid: EpsGrid,
    center: Sequence[float],
    envelope: Optional[RadialEnvelope] = None,
    inner_radius: float = 0.0,
) -> GridSum:
    """
    Exact sum of f over grid points with inner_radius <= ||theta - center|| < radius, plus a tail bound.

    @help.title Truncated Grid Sum
    @help.description Brute-force oracle for the summation lemmas. When the ball does not cover
    the whole grid, ``envelope`` must dominate f radially beyond ``radius``; its analytic
    remainder is returned as the tail.
    @help.example
        truncated_grid_sum(lambda p: np.exp(-np.sum(p**2, axis=1)), 20.0, EpsGrid.lattice(1, 1.0),
                           [0.0], gaussian_envelope(1.0))  # (1.772638, <1e-170)
    """
    center = np.asarray(center, dtype=float)
    points = grid.points_near(center, radius)
    if inner_radius > 0.0 and points.size:
        points = points[np.linalg.norm(points - center, axis=1) >= inner_radius]
    values = np.asarray(func(points), dtype=float) if points.size else np.zeros(0)
    if np.any(values < 0.0):
        raise ValueError("truncated_grid_sum needs a non-negative function")
    total = fsum(values)

    if grid.box.bounded:
        corners = np.array(np.meshgrid(*zip(grid.box.lower, grid.box.upper), indexing="ij")).reshape(grid.dim, -1).T
        if np.all(np.linalg.norm(corners - center, axis=1) < radius):
            return GridSum(total, 0.0)
    if envelope is None:
        raise PreconditionError("a radial envelope bounds the tail of an infinite lattice")
    tail = lattice_tail_bound(envelope, grid.eps, grid.dim, max(radius, inner_radius))
    logger.debug("truncated sum %.6g over %d points, tail %.3g", total, len(values), tail)
    return GridSum(total, tail)


def gaussian_lattice_sum(eps: float, c: float, d: int, center: Sequence[float], offset=0.0,
                         radius: Optional[float] = None) -> GridSum:
    """Oracle for the sum of exp(-c ||theta - center||^2) over v + eps Z^d, summed axis by axis."""
    _require_positive(eps=eps, c=c)
    center = np.broadcast_to(np.asarray(center, dtype=float), (d,))
    offsets = np.broadcast_to(np.asarray(offset, dtype=float), (d,))
    if radius is None:
        radius = 20.0 / math.sqrt(c) + eps
    envelope = gaussian_envelope(c)
    totals, uppers = [], []
    for j in range(d):
        axis = EpsGrid.lattice(1, eps, offsets[j])
        part = truncated_grid_sum(
            lambda p, cj=center[j]: np.exp(-c * (p[:, 0] - cj) ** 2), radius, axis, [center[j]], envelope
        )
        totals.append(part.total)
        uppers.append(part.upper)
    total = math.prod(totals)
    return GridSum(total, math.prod(uppers) - total)


def oracle_radius(eps: float, R: float, c: Optional[float] = None, d: int = 1, max_points: int = 200_000) -> float:
    """
    Truncation radius max(20/sqrt(c), R + 30 eps), shrunk toward R + 8 eps when the ball
    would hold more than ``max_points`` lattice points.

    The shrunken radius is never below R + 8 eps. Whatever the ball leaves out is carried by
    the analytic tail remainder of truncated_grid_sum, so the cap changes tightness only.
    """
    radius = R + 30.0 * eps
    if c is not None:
        radius = max(radius, 20.0 / math.sqrt(c))
    floor = R + 8.0 * eps
    while radius > floor and (2.0 * radius / eps + 1.0) ** d > max_points:
        radius = max(floor, 0.8 * radius)
    return radius
