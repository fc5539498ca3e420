"""
Commands behind the command-line interface.

@help.category CLI
@help.title Commands
@help.description certify computes every requested certificate per sample size and lists the
ones whose hypotheses fail; mc-risk estimates the risk by Monte Carlo and compares it with the
certificates; verify-lemmas runs the lemma oracle suite. Every report embeds the library
version and, where there is one, the full experiment config.
@help.use_case Reproducible experiment runs whose JSON and CSV outputs feed plots and audits.
"""
import csv
import io
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src import __version__
from src.bounds import certificate as ledger
from src.bounds.certificate import BoundCertificate, Expectation, Provenance, TheoremId
from src.bounds.certificates import (
    bhattacharyya_certificate,
    entropy_certificate,
    gaussian_decay_certificate,
    gaussian_decay_concrete_certificate,
    general_certificate,
    kl_net_certificate,
    location_family_envelope,
    minimax_certificate,
    mixed_regime_certificate,
    penalty_pseudo_certificate,
    quadratic_certificate,
    squared_norm_certificate,
    tail_probability_bound,
)
from src.bounds.resolvability import ResolvabilityIndex, resolvability_index
from src.cli.config import ExperimentConfig
from src.estimator.mle import PenalizedMLE, kraft_sum
from src.estimator.penalty import CodelengthPenalty, SquaredNormPenalty, ZeroPenalty
from src.models.base import ModelMember
from src.models.divergences import gaussian_decay_constant, kl_net_beta
from src.utils.errors import BudgetExceededError, EigenvalueError, PreconditionError
from src.utils.seeding import derive_seed
from src.verify.lemmas import LemmaCheckLedger, lemma_suite
from src.verify.risk import RiskReport, TailReport, budget_deadline, mc_risk, mc_tail_frequency

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "n", "eps", "reps", "seed", "mc_risk", "stderr",
    "certificate_id", "certificate_value", "satisfied", "margin",
)
THETA_STAR = "theta_star supplied"
EMPIRICAL_THEOREMS = (TheoremId.ENTROPY, TheoremId.QUADRATIC, TheoremId.BHATTACHARYYA_MINUS_PENALTY)
EMPIRICAL_SUFFIX = "[mc]"
TAIL_STREAM = 1


# ------------------------------------------------------------------ reports


class Inapplicable(BaseModel):
    theorem_id: TheoremId
    hypothesis: str
    # @help.description The hypothesis that failed
    detail: str = ""


class TailBound(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    t: float
    kraft_sum: float
    bound: float


class CertificateSet(BaseModel):
    """
    Certificates for one sample size.

    @help.title CertificateSet Model
    @help.description ``minimum`` names the smallest informative certificate.
    """

    model_config = ConfigDict(ser_json_inf_nan="strings")

    n: int
    eps: float
    grid_points: int
    resolvability: Optional[float] = None
    resolvability_minimizer: Optional[List[float]] = None
    certificates: List[BoundCertificate] = Field(default_factory=list)
    inapplicable: List[Inapplicable] = Field(default_factory=list)
    minimum: Optional[TheoremId] = None
    tail: Optional[TailBound] = None

    def certificate(self, theorem_id: TheoremId) -> BoundCertificate:
        for cert in self.certificates:
            if cert.theorem_id == theorem_id:
                return cert
        raise KeyError(theorem_id.value)


class SampleEstimate(BaseModel):
    n: int
    eps: float
    theta: List[float]
    objective: float


class CertifyReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    version: str = __version__
    config: ExperimentConfig
    results: List[CertificateSet]
    estimate: Optional[SampleEstimate] = None


class RiskRun(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    risk: RiskReport
    tail: Optional[TailReport] = None

    @property
    def satisfied(self) -> bool:
        return self.risk.all_satisfied and (self.tail is None or self.tail.satisfied)


class McRiskReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    version: str = __version__
    config: ExperimentConfig
    runs: List[RiskRun] = Field(default_factory=list)
    partial: bool = False
    # @help.description True when the runtime budget stopped the sweep early

    @property
    def all_satisfied(self) -> bool:
        return all(run.satisfied for run in self.runs)


class LemmaReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    version: str = __version__
    seed: int
    trials: int
    ledger: LemmaCheckLedger


# --------------------------------------------------------------- experiment


class Expectations(NamedTuple):
    """Values plugged in for the expectations at theta_hat; low where subtracted, high where added."""

    penalty_low: Expectation
    penalty_high: Expectation
    pseudo_high: Expectation
    entropy: Expectation
    variance: Expectation


class Experiment:
    """Family, grid, penalty and resolvability for one sample size."""

    def __init__(self, config: ExperimentConfig, n: int):
        self.config = config
        self.n = n
        self.family = config.build_family()
        self.grid = config.grid.build(n)
        self.penalty = config.penalty.build(self.grid)
        self.points = self.grid.enumerate_points()
        if self.points.shape[0] == 0:
            raise ValueError(f"grid is empty at n={n}")
        self.penalty_values = self.penalty.evaluate(self.points)
        self.theta_star = None if config.theta_star is None else np.asarray(config.theta_star, dtype=float)
        self.truth = None if self.theta_star is None else ModelMember(self.family, self.theta_star)
        self.pseudo = config.pseudo.build(self.family, self.truth, self.theta_star, self.penalty, n)
        self.resolvability: Optional[ResolvabilityIndex] = None
        if self.truth is not None:
            self.resolvability = resolvability_index(self.family, self.grid, self.penalty, self.truth, n)

    @property
    def eps(self) -> float:
        return self.grid.eps

    @property
    def d(self) -> int:
        return self.grid.dim

    def resolvability_value(self) -> float:
        if self.resolvability is None:
            raise PreconditionError(THETA_STAR, "the resolvability index needs the true parameter")
        return self.resolvability.value

    def require_truth(self) -> ModelMember:
        if self.truth is None:
            raise PreconditionError(THETA_STAR)
        return self.truth

    def decay_constant(self):
        """(c, checked): the configured override is asserted, the computed constant is checked."""
        if self.config.decay_constant is not None:
            return self.config.decay_constant, False
        return gaussian_decay_constant(self.family, self.grid.box), True

    def require_sqrt_rule(self) -> None:
        if abs(self.eps - math.sqrt(2.0 / self.n)) > 1e-12 * max(1.0, self.eps):
            raise PreconditionError(ledger.EPS_RULE, f"eps={self.eps:g}")

    def grid_expectations(self) -> Expectations:
        """Conservative values read off the grid: extremes of L and pseudo, log |grid|, max spread."""
        pseudo_values = self.pseudo.evaluate(self.points) if self.pseudo is not None else np.zeros(1)
        middle = 0.5 * (self.points.min(axis=0) + self.points.max(axis=0))
        spread = float(np.max(np.sum((self.points - middle) ** 2, axis=1)))

        def bound(value: float) -> Expectation:
            return Expectation(value=float(value), provenance=Provenance.BOUND)

        return Expectations(
            penalty_low=bound(np.min(self.penalty_values)),
            penalty_high=bound(np.max(self.penalty_values)),
            pseudo_high=bound(np.max(pseudo_values)),
            entropy=bound(math.log(self.points.shape[0])),
            variance=bound(spread),
        )


def monte_carlo_expectations(report: RiskReport) -> Expectations:
    penalty = report.penalty_expectation()
    return Expectations(
        penalty_low=penalty,
        penalty_high=penalty,
        pseudo_high=Expectation.monte_carlo(report.e_pseudo_hat),
        entropy=report.entropy_expectation(),
        variance=report.variance_expectation(),
    )


# ----------------------------------------------------------------- builders


Builder = Callable[[Experiment, Expectations], BoundCertificate]


def _general(exp: Experiment, e: Expectations) -> BoundCertificate:
    return general_certificate(exp.grid, exp.penalty, exp.pseudo, e.pseudo_high, exp.resolvability_value(), exp.n)


def _subtract_penalty(exp: Experiment, e: Expectations) -> BoundCertificate:
    return general_certificate(
        exp.grid, exp.penalty, exp.pseudo, e.pseudo_high, exp.resolvability_value(), exp.n,
        mode="subtract", expected_penalty=e.penalty_low,
    )


def _bhattacharyya(exp: Experiment, e: Expectations, with_penalty: bool = True) -> BoundCertificate:
    truth = exp.require_truth()
    return bhattacharyya_certificate(
        exp.grid, exp.penalty, exp.config.alpha, lambda points: truth.affinity_to(exp.family, points),
        exp.resolvability_value(), exp.n, with_penalty=with_penalty,
        expected_penalty=None if with_penalty else e.penalty_low,
    )


def _gaussian_decay(exp: Experiment, e: Expectations) -> BoundCertificate:
    c, checked = exp.decay_constant()
    return gaussian_decay_certificate(
        exp.eps, exp.d, exp.n, c, exp.resolvability_value(), e.penalty_low,
        c_checked=checked, penalty_is_zero=isinstance(exp.penalty, ZeroPenalty),
    )


def _gaussian_decay_concrete(exp: Experiment, e: Expectations) -> BoundCertificate:
    exp.require_sqrt_rule()
    if not isinstance(exp.penalty, ZeroPenalty):
        raise PreconditionError(ledger.ZERO_PENALTY, f"penalty is {exp.penalty.kind}")
    c, checked = exp.decay_constant()
    # with a zero penalty the resolvability index is D(P || grid)
    return gaussian_decay_concrete_certificate(exp.d, exp.n, c, exp.resolvability_value(), c_checked=checked)


def _minimax(exp: Experiment, e: Expectations) -> BoundCertificate:
    exp.require_sqrt_rule()
    c, checked = exp.decay_constant()
    beta = kl_net_beta(exp.family, exp.grid.box)
    return minimax_certificate(beta, c, exp.d, exp.n, c_checked=checked)


def _mixed_regime(exp: Experiment, e: Expectations) -> BoundCertificate:
    env = location_family_envelope(exp.family, exp.require_truth().theta, exp.eps)
    return mixed_regime_certificate(
        exp.eps, exp.d, exp.n, env.c, env.a, env.b, env.R, exp.resolvability_value(), e.penalty_low
    )


def _squared_norm(exp: Experiment, e: Expectations) -> BoundCertificate:
    if not isinstance(exp.penalty, SquaredNormPenalty):
        raise PreconditionError(ledger.SQUARED_NORM_PENALTY, f"penalty is {exp.penalty.kind}")
    theta = exp.require_truth().theta
    env = location_family_envelope(exp.family, theta, exp.eps)
    return squared_norm_certificate(
        exp.eps, exp.d, exp.n, env.c, env.a, env.b, env.R, float(np.linalg.norm(theta)), exp.resolvability_value()
    )


def _entropy(exp: Experiment, e: Expectations) -> BoundCertificate:
    return entropy_certificate(exp.resolvability_value(), e.entropy, e.penalty_low, exp.n)


def _quadratic(exp: Experiment, e: Expectations) -> BoundCertificate:
    return quadratic_certificate(
        exp.eps, exp.d, exp.config.quadratic_alpha, e.variance, e.penalty_low, exp.resolvability_value(), exp.n
    )


def _penalty_pseudo(exp: Experiment, e: Expectations) -> BoundCertificate:
    return penalty_pseudo_certificate(
        exp.grid, exp.penalty, exp.config.penalty_alpha, e.penalty_high, exp.resolvability_value(), exp.n
    )


def _map(exp: Experiment, e: Expectations) -> BoundCertificate:
    if not (isinstance(exp.penalty, CodelengthPenalty) and exp.penalty.mode == "map"):
        raise PreconditionError(ledger.PRIOR_PMF, f"penalty is {exp.penalty.kind}")
    return penalty_pseudo_certificate(exp.grid, exp.penalty, 1.0, e.penalty_high, exp.resolvability_value(), exp.n)


def _kl_net(exp: Experiment, e: Expectations) -> BoundCertificate:
    if not (isinstance(exp.penalty, CodelengthPenalty) and exp.penalty.mode == "twice"):
        raise PreconditionError(ledger.TWICE_KRAFT, f"penalty is {exp.penalty.kind}")
    beta = kl_net_beta(exp.family, exp.grid.box)
    return kl_net_certificate(beta * exp.eps**2, math.log(exp.points.shape[0]), exp.n)


BUILDERS: Dict[TheoremId, Builder] = {
    TheoremId.GENERAL: _general,
    TheoremId.SUBTRACT_PENALTY: _subtract_penalty,
    TheoremId.BHATTACHARYYA: _bhattacharyya,
    TheoremId.BHATTACHARYYA_MINUS_PENALTY: lambda exp, e: _bhattacharyya(exp, e, with_penalty=False),
    TheoremId.GAUSSIAN_DECAY: _gaussian_decay,
    TheoremId.GAUSSIAN_DECAY_CONCRETE: _gaussian_decay_concrete,
    TheoremId.MINIMAX: _minimax,
    TheoremId.MIXED_REGIME: _mixed_regime,
    TheoremId.SQUARED_NORM: _squared_norm,
    TheoremId.ENTROPY: _entropy,
    TheoremId.QUADRATIC: _quadratic,
    TheoremId.PENALTY_PSEUDO: _penalty_pseudo,
    TheoremId.MAP: _map,
    TheoremId.KL_NET: _kl_net,
}


def build_certificates(exp: Experiment, theorems: List[TheoremId], expectations: Expectations):
    """(certificates, inapplicable): one certificate per theorem whose hypotheses hold."""
    certificates: List[BoundCertificate] = []
    inapplicable: List[Inapplicable] = []
    for theorem in theorems:
        try:
            cert = BUILDERS[theorem](exp, expectations)
        except PreconditionError as exc:
            inapplicable.append(Inapplicable(theorem_id=theorem, hypothesis=exc.hypothesis, detail=exc.detail))
            logger.info("n=%d: %s inapplicable: %s", exp.n, theorem.value, exc)
            continue
        except (EigenvalueError, ValueError) as exc:
            inapplicable.append(Inapplicable(theorem_id=theorem, hypothesis=type(exc).__name__, detail=str(exc)))
            logger.info("n=%d: %s inapplicable: %s", exp.n, theorem.value, exc)
            continue
        # an alpha = 1 MAP penalty turns the penalty-pseudo request into the map bound
        if any(c.theorem_id == cert.theorem_id for c in certificates):
            continue
        certificates.append(cert)
    return certificates, inapplicable


def _minimum(certificates: List[BoundCertificate]) -> Optional[TheoremId]:
    informative = [c for c in certificates if c.informative]
    if not informative:
        return None
    return min(informative, key=lambda c: c.value).theorem_id


# ----------------------------------------------------------------- commands


def _sample_estimate(config: ExperimentConfig, base_dir: Optional[Path]) -> SampleEstimate:
    data = config.load_sample(base_dir)
    grid = config.grid.build(data.n)
    estimate = PenalizedMLE(config.build_family(), grid, config.penalty.build(grid)).fit(data)
    return SampleEstimate(n=data.n, eps=grid.eps, theta=estimate.theta.tolist(), objective=estimate.objective)


def cmd_certify(config: ExperimentConfig, base_dir: Optional[Path] = None) -> CertifyReport:
    """
    Certificate bundle, one CertificateSet per configured sample size.

    @help.title certify Command
    @help.description Expectations at theta_hat are replaced by their conservative grid values
    (provenance "bound"). Theorems whose hypotheses fail are listed under ``inapplicable``.
    """
    theorems = config.requested()
    results = []
    for n in config.n:
        exp = Experiment(config, n)
        certificates, inapplicable = build_certificates(exp, theorems, exp.grid_expectations())
        result = CertificateSet(
            n=n,
            eps=exp.eps,
            grid_points=int(exp.points.shape[0]),
            resolvability=None if exp.resolvability is None else exp.resolvability.value,
            resolvability_minimizer=(
                None if exp.resolvability is None or exp.resolvability.minimizer is None
                else exp.resolvability.minimizer.tolist()
            ),
            certificates=certificates,
            inapplicable=inapplicable,
            minimum=_minimum(certificates),
        )
        if config.t is not None:
            total = kraft_sum(exp.grid, exp.penalty, exp.pseudo).value
            result.tail = TailBound(t=config.t, kraft_sum=total, bound=tail_probability_bound(config.t, n, total))
        logger.info("n=%d: %d certificates, %d inapplicable", n, len(certificates), len(inapplicable))
        results.append(result)
    estimate = _sample_estimate(config, base_dir) if config.sample_path is not None else None
    return CertifyReport(config=config, results=results, estimate=estimate)


def cmd_mc_risk(
    config: ExperimentConfig,
    seed: int,
    reps: int,
    budget_seconds: Optional[float] = None,
    threads: Optional[int] = None,
) -> McRiskReport:
    """
    Monte Carlo risk per sample size, compared with the configured and empirical certificates.

    @help.title mc-risk Command
    @help.description Each sample size runs with the same seed. Besides the configured
    certificates (grid-bound expectations) the entropy, quadratic and Bhattacharyya-minus-penalty
    certificates are recomputed with Monte Carlo expectations and marked empirical. With ``t``
    configured the tail frequency is checked as well. ``budget_seconds`` covers the whole sweep,
    tail checks included. An overrun raises BudgetExceededError whose ``partial`` is the report
    of the finished sample sizes.
    """
    if config.theta_star is None:
        raise PreconditionError(THETA_STAR, "mc-risk samples from P_theta*")
    theorems = config.requested()
    report = McRiskReport(config=config)
    deadline = budget_deadline(budget_seconds)
    for n in config.n:
        exp = Experiment(config, n)
        try:
            risk = mc_risk(
                exp.family, exp.truth, exp.grid, exp.penalty, n, reps, seed,
                pseudo=exp.pseudo, threads=threads, budget_seconds=budget_seconds, deadline=deadline,
            )
            tail = None
            if config.t is not None:
                tail = mc_tail_frequency(
                    exp.family, exp.truth, exp.grid, exp.penalty, exp.pseudo, n, config.t, reps,
                    derive_seed(seed, TAIL_STREAM), threads=threads, budget_seconds=budget_seconds,
                    deadline=deadline,
                )
        except BudgetExceededError as exc:
            logger.warning("n=%d stopped after the %ss budget", n, budget_seconds)
            raise BudgetExceededError(exc.seconds, partial=report.model_copy(update={"partial": True})) from exc
        configured, _ = build_certificates(exp, theorems, exp.grid_expectations())
        empirical, _ = build_certificates(exp, list(EMPIRICAL_THEOREMS), monte_carlo_expectations(risk))
        risk = risk.compare(configured + empirical)
        logger.info("n=%d: mc_risk=%.6g +/- %.2g", n, risk.mc_risk, risk.stderr)
        report.runs.append(RiskRun(risk=risk, tail=tail))
    return report


def cmd_verify_lemmas(seed: int, trials: int) -> LemmaReport:
    return LemmaReport(seed=seed, trials=trials, ledger=lemma_suite(seed, trials))


# ------------------------------------------------------------------ outputs


def risk_csv(report: McRiskReport) -> str:
    """RFC-4180 table with CSV_COLUMNS, one row per (n, certificate)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for run in report.runs:
        risk = run.risk
        for comparison in risk.comparisons:
            certificate_id = comparison.certificate_id + (EMPIRICAL_SUFFIX if comparison.empirical else "")
            writer.writerow([
                risk.n, repr(risk.eps), risk.reps, risk.seed, repr(risk.mc_risk), repr(risk.stderr),
                certificate_id, repr(comparison.value), str(comparison.satisfied).lower(), repr(comparison.margin),
            ])
    return buffer.getvalue()


def write_json(model: BaseModel, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2), encoding="utf-8")
    return path


def write_text(text: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return path


def write_replays(ledger_: LemmaCheckLedger, directory: Path) -> List[Path]:
    """One JSON file per failing check with everything needed to replay it."""
    written = []
    for record in ledger_.records:
        if record.failures:
            written.append(write_json(record, directory / f"{record.check_id}.json"))
    return written
