"""
Monte Carlo risk harness.

@help.category Verify
@help.title Monte Carlo Risk
@help.description Estimates E D_B(P, P_theta_hat) by repeated sampling and fitting, together with
the empirical penalty and pseudo-penalty expectations, the plug-in entropy and the variance of
theta_hat. Replicate r draws its sample with a seed derived from (seed, r) only, so results do not
depend on how replicates are scheduled across threads.
@help.performance D_B, the penalty and the pseudo-penalty are tabulated once per grid; each
replicate then costs one sample and one grid scan.
@help.example
    report = mc_risk(GaussianLocation(1), [0.0], grid, ZeroPenalty(), n=100, reps=2000, seed=7)
    report.compare([gaussian_decay_concrete_certificate(1, 100, 0.125, 0.0)])
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import binomtest

from src.bounds.certificate import BoundCertificate, Expectation
from src.bounds.certificates import tail_probability_bound
from src.bounds.resolvability import as_truth
from src.config.settings import get_settings
from src.estimator.mle import PenalizedMLE, kraft_sum
from src.estimator.penalty import Penalty, PseudoPenalty
from src.grid.lattice import EpsGrid
from src.models.base import ParametricFamily, TrueDistribution
from src.models.divergences import bhattacharyya_from_affinity
from src.utils.errors import BudgetExceededError
from src.utils.numerics import fsum
from src.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

# Two-sided 3-sigma coverage for binomial intervals.
THREE_SIGMA_CONFIDENCE = 0.9973


class CertificateComparison(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    certificate_id: str
    value: float
    satisfied: bool
    # @help.description mc_risk + sigmas * stderr <= value
    margin: float
    # @help.description value - (mc_risk + sigmas * stderr)
    empirical: bool = False


class RiskReport(BaseModel):
    """
    Monte Carlo estimate of the Bhattacharyya risk.

    @help.title RiskReport Model
    @help.description stderr is the sample standard deviation over sqrt(reps). A replicate
    with infinite D_B makes the whole report non-informative (mc_risk = inf) instead of being
    dropped.
    """

    model_config = ConfigDict(ser_json_inf_nan="strings")

    mc_risk: float
    stderr: float
    reps: int
    seed: int
    n: int
    eps: float
    e_penalty_hat: float
    # @help.description Mean penalty at theta_hat
    e_penalty_stderr: float
    e_pseudo_hat: float
    # @help.description Mean pseudo-penalty at theta_hat
    entropy_hat: float
    # @help.description Plug-in entropy of the empirical distribution of theta_hat
    distinct_estimates: int
    var_hat: float
    # @help.description Mean squared distance of theta_hat from its empirical mean
    informative: bool = True
    comparisons: List[CertificateComparison] = Field(default_factory=list)

    def compare(self, certificates: Sequence[BoundCertificate], sigmas: Optional[float] = None) -> "RiskReport":
        """Report with one comparison per certificate appended."""
        if sigmas is None:
            sigmas = get_settings().comparison_sigmas
        upper = self.mc_risk + sigmas * self.stderr
        rows = list(self.comparisons)
        for cert in certificates:
            margin = cert.value - upper
            rows.append(
                CertificateComparison(
                    certificate_id=cert.theorem_id.value,
                    value=cert.value,
                    satisfied=bool(self.informative and upper <= cert.value),
                    margin=margin,
                    empirical=cert.empirical,
                )
            )
        return self.model_copy(update={"comparisons": rows})

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.comparisons)

    def penalty_expectation(self) -> Expectation:
        return Expectation.monte_carlo(self.e_penalty_hat, self.e_penalty_stderr)

    def entropy_expectation(self) -> Expectation:
        return Expectation.monte_carlo(self.entropy_hat)

    def variance_expectation(self) -> Expectation:
        return Expectation.monte_carlo(self.var_hat)


class TailReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    t: float
    n: int
    reps: int
    seed: int
    exceedances: int
    frequency: float
    ci_low: float
    ci_high: float
    kraft_sum: float
    bound: float
    satisfied: bool
    # @help.description ci_low <= bound: no significant violation at 3 sigma


class WorstCaseReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    mc_risk: float
    stderr: float
    theta: List[float]
    reports: List[RiskReport]


# ------------------------------------------------------------------ replicates

_clock = time.monotonic


class _Experiment:
    """Tabulated quantities shared by every replicate of one configuration."""

    def __init__(self, family: ParametricFamily, truth: TrueDistribution, grid: EpsGrid,
                 penalty: Penalty, pseudo: Optional[PseudoPenalty]):
        self.truth = truth
        self.estimator = PenalizedMLE(family, grid, penalty)
        points = self.estimator.points
        self.divergence = bhattacharyya_from_affinity(truth.affinity_to(family, points))
        self.penalty_values = self.estimator.penalty_values
        self.pseudo_values = pseudo.evaluate(points) if pseudo is not None else np.zeros(points.shape[0])


def _run_replicates(count: int, task: Callable[[int], object], threads: int,
                    deadline: Optional[float], budget: Optional[float]) -> list:
    def guarded(r: int):
        if deadline is not None and _clock() > deadline:
            raise BudgetExceededError(budget)
        return task(r)

    if threads <= 1:
        results = []
        for r in range(count):
            try:
                results.append(guarded(r))
            except BudgetExceededError as exc:
                exc.partial = len(results)
                raise
        return results
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves replicate order
        return list(pool.map(guarded, range(count)))


def budget_deadline(budget_seconds: Optional[float]) -> Optional[float]:
    """Clock reading after which replicates stop; None means unlimited."""
    if budget_seconds is None:
        return None
    return _clock() + budget_seconds


def _resolve_deadline(deadline: Optional[float], budget_seconds: Optional[float]) -> Optional[float]:
    return deadline if deadline is not None else budget_deadline(budget_seconds)


def plug_in_entropy(positions: np.ndarray) -> float:
    """Entropy of the empirical distribution of the given labels."""
    _, counts = np.unique(positions, return_counts=True)
    freq = counts / counts.sum()
    return float(-fsum(freq * np.log(freq)))


def mc_risk(
    family: ParametricFamily,
    truth,
    grid: EpsGrid,
    penalty: Penalty,
    n: int,
    reps: int,
    seed: int,
    pseudo: Optional[PseudoPenalty] = None,
    threads: Optional[int] = None,
    budget_seconds: Optional[float] = None,
    deadline: Optional[float] = None,
) -> RiskReport:
    """
    Monte Carlo estimate of E D_B(P, P_theta_hat).

    @help.title mc_risk Function
    @help.description ``truth`` is a parameter vector (P = P_theta*) or a TrueDistribution.
    ``threads`` defaults to RESOLV_THREADS. Raises BudgetExceededError past ``budget_seconds``,
    or past ``deadline`` when a caller shares one budget across several runs.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if n < 1:
        raise ValueError("sample size n must be >= 1")
    truth = as_truth(family, truth)
    if threads is None:
        threads = get_settings().resolv_threads
    experiment = _Experiment(family, truth, grid, penalty, pseudo)

    def replicate(r: int) -> int:
        data = truth.sample(n, derive_seed(seed, r))
        return experiment.estimator.fit(data).position

    logger.info("mc_risk: n=%d, reps=%d, grid of %d points", n, reps, experiment.penalty_values.size)
    deadline = _resolve_deadline(deadline, budget_seconds)
    positions = np.asarray(_run_replicates(reps, replicate, threads, deadline, budget_seconds), dtype=np.int64)
    return _summarize(experiment, positions, n, grid.eps, seed)


def _summarize(experiment: _Experiment, positions: np.ndarray, n: int, eps: float, seed: int) -> RiskReport:
    reps = positions.size
    losses = experiment.divergence[positions]
    informative = bool(np.all(np.isfinite(losses)))
    if informative:
        risk = fsum(losses) / reps
        stderr = float(np.std(losses, ddof=1)) / math.sqrt(reps)
    else:
        logger.warning("infinite Bhattacharyya divergence in %d replicates", int(np.sum(~np.isfinite(losses))))
        risk, stderr = math.inf, math.inf

    penalties = experiment.penalty_values[positions]
    thetas = experiment.estimator.points[positions]
    centered = thetas - thetas.mean(axis=0)
    return RiskReport(
        mc_risk=risk,
        stderr=stderr,
        reps=reps,
        seed=seed,
        n=n,
        eps=eps,
        e_penalty_hat=fsum(penalties) / reps,
        e_penalty_stderr=float(np.std(penalties, ddof=1)) / math.sqrt(reps),
        e_pseudo_hat=fsum(experiment.pseudo_values[positions]) / reps,
        entropy_hat=plug_in_entropy(positions),
        distinct_estimates=int(np.unique(positions).size),
        var_hat=fsum(np.sum(centered * centered, axis=1)) / reps,
        informative=informative,
    )


def mc_tail_frequency(
    family: ParametricFamily,
    truth,
    grid: EpsGrid,
    penalty: Penalty,
    pseudo: Optional[PseudoPenalty],
    n: int,
    t: float,
    reps: int,
    seed: int,
    threads: Optional[int] = None,
    budget_seconds: Optional[float] = None,
    deadline: Optional[float] = None,
) -> TailReport:
    """
    Frequency of D_B - [(1/n) sum log(p/p_theta_hat) + (L + pseudo)(theta_hat)/n] >= t
    against the bound exp(-n t / 2) * sum exp(-(L + pseudo)/2).
    """
    if t < 0.0:
        raise ValueError("t must be non-negative")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    truth = as_truth(family, truth)
    if threads is None:
        threads = get_settings().resolv_threads
    experiment = _Experiment(family, truth, grid, penalty, pseudo)

    def replicate(r: int) -> bool:
        data = truth.sample(n, derive_seed(seed, r))
        estimate = experiment.estimator.fit(data)
        position = estimate.position
        log_lik_model = -(estimate.objective - experiment.penalty_values[position])
        log_lik_truth = fsum(truth.log_density(data.points))
        excess = experiment.divergence[position] - (
            (log_lik_truth - log_lik_model) + experiment.penalty_values[position] + experiment.pseudo_values[position]
        ) / n
        return bool(excess >= t)

    deadline = _resolve_deadline(deadline, budget_seconds)
    hits = sum(_run_replicates(reps, replicate, threads, deadline, budget_seconds))
    kraft = kraft_sum(grid, penalty, pseudo).value
    bound = tail_probability_bound(t, n, kraft)
    ci = binomtest(hits, reps).proportion_ci(confidence_level=THREE_SIGMA_CONFIDENCE, method="wilson")
    satisfied = bool(ci.low <= bound)
    if not satisfied:
        logger.warning("tail frequency %d/%d exceeds the bound %.3g at t=%g", hits, reps, bound, t)
    return TailReport(
        t=t, n=n, reps=reps, seed=seed, exceedances=hits, frequency=hits / reps,
        ci_low=float(ci.low), ci_high=float(ci.high), kraft_sum=kraft, bound=bound, satisfied=satisfied,
    )


def mc_worst_case_risk(
    family: ParametricFamily,
    grid: EpsGrid,
    penalty: Penalty,
    n: int,
    reps: int,
    seed: int,
    thetas: Sequence[Sequence[float]],
    threads: Optional[int] = None,
    budget_seconds: Optional[float] = None,
) -> WorstCaseReport:
    """
    Largest mc_risk over the supplied theta*; run k uses seed derive_seed(seed, k).

    Thetas on and off the grid reproduce the minimax comparison. ``budget_seconds`` covers all runs.
    """
    if len(thetas) == 0:
        raise ValueError("at least one theta is required")
    deadline = budget_deadline(budget_seconds)
    reports = [
        mc_risk(family, np.asarray(theta, dtype=float), grid, penalty, n, reps, derive_seed(seed, k),
                threads=threads, budget_seconds=budget_seconds, deadline=deadline)
        for k, theta in enumerate(thetas)
    ]
    worst = max(range(len(reports)), key=lambda k: reports[k].mc_risk)
    return WorstCaseReport(
        mc_risk=reports[worst].mc_risk,
        stderr=reports[worst].stderr,
        theta=[float(v) for v in np.asarray(thetas[worst], dtype=float)],
        reports=reports,
    )
