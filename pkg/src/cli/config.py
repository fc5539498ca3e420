"""
Experiment configuration.

@help.category CLI
@help.title Experiment Config
@help.description One JSON document describes an experiment: the family, the true parameter
(or a file of observations), the grid, the penalty and pseudo-penalty, the sample sizes, the
Monte Carlo settings and which certificates to compute. Validation failures carry the field
path of every offending entry.
@help.example
    {
      "family": "gaussian", "dim": 1, "theta_star": [0.0],
      "grid": {"eps_rule": "sqrt(2/n)", "lower": [-3.0], "upper": [3.0]},
      "n": [25, 100, 400], "reps": 2000, "certificates": "all-applicable"
    }
"""
import math
from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.bounds.certificate import TheoremId
from src.estimator.penalty import (
    AlphaBhattacharyyaPseudoPenalty,
    AlphaTimesPenaltyPseudoPenalty,
    CodelengthPenalty,
    ConstantPenalty,
    Penalty,
    PseudoPenalty,
    QuadraticPseudoPenalty,
    SquaredNormPenalty,
    ZeroPenalty,
    ZeroPseudoPenalty,
)
from src.grid.lattice import EpsGrid, eps_from_rule
from src.models.base import Box, DataSample, ParametricFamily, TrueDistribution
from src.models.registry import get_family

ALL_APPLICABLE = "all-applicable"
SQRT_RULE = "sqrt(2/n)"


class GridSpec(BaseModel):
    """
    Grid v + eps Z^d within [lower, upper].

    @help.title Grid Spec
    @help.description Exactly one of ``eps`` and ``eps_rule`` is given; "const/sqrt(n)" also
    needs ``eps_constant``.
    """

    model_config = ConfigDict(extra="forbid")

    offset: Union[float, List[float]] = 0.0
    eps: Optional[float] = Field(default=None, gt=0)
    eps_rule: Optional[Literal["sqrt(2/n)", "const/sqrt(n)"]] = None
    eps_constant: Optional[float] = Field(default=None, gt=0)
    lower: List[float] = Field(min_length=1)
    upper: List[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _check(self) -> "GridSpec":
        if (self.eps is None) == (self.eps_rule is None):
            raise ValueError("give exactly one of eps and eps_rule")
        if self.eps_rule == "const/sqrt(n)" and self.eps_constant is None:
            raise ValueError("eps_rule const/sqrt(n) needs eps_constant")
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")
        for lo, hi in zip(self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError("grid box must be finite with lower <= upper")
        if isinstance(self.offset, list) and len(self.offset) != len(self.lower):
            raise ValueError("offset must have one entry per coordinate")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def uses_sqrt_rule(self) -> bool:
        return self.eps_rule == SQRT_RULE

    def spacing(self, n: int) -> float:
        if self.eps is not None:
            return self.eps
        return eps_from_rule(self.eps_rule, n, self.eps_constant)

    def box(self) -> Box:
        return Box(lower=tuple(self.lower), upper=tuple(self.upper))

    def build(self, n: int) -> EpsGrid:
        return EpsGrid.create(self.offset, self.spacing(n), self.box())


class PenaltySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["zero", "constant", "squared-norm", "codelength"] = "zero"
    # @help.description codelength is the uniform codelength over the grid
    value: Optional[float] = None
    # @help.description Value of the constant penalty
    mode: Literal["twice", "map"] = "twice"
    # @help.description Codelength mode: 2 log(1/q) (twice) or log(1/q) (map)

    @model_validator(mode="after")
    def _check(self) -> "PenaltySpec":
        if self.kind == "constant" and self.value is None:
            raise ValueError("constant penalty needs a value")
        return self

    def build(self, grid: EpsGrid) -> Penalty:
        if self.kind == "zero":
            return ZeroPenalty()
        if self.kind == "constant":
            return ConstantPenalty(self.value)
        if self.kind == "squared-norm":
            return SquaredNormPenalty()
        return CodelengthPenalty.uniform(grid, self.mode)


class PseudoSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["zero", "quadratic", "alpha-bhattacharyya", "alpha-penalty"] = "zero"
    alpha: float = Field(default=0.0, ge=0.0)
    center: Optional[List[float]] = None
    # @help.description Centre of the quadratic pseudo-penalty (defaults to theta*)

    def build(self, family: ParametricFamily, truth: Optional[TrueDistribution], theta_star,
              penalty: Penalty, n: int) -> Optional[PseudoPenalty]:
        if self.kind == "zero":
            return ZeroPseudoPenalty()
        if self.kind == "alpha-penalty":
            return AlphaTimesPenaltyPseudoPenalty(self.alpha, penalty)
        if truth is None:
            raise ValueError(f"{self.kind} pseudo-penalty needs theta_star")
        if self.kind == "quadratic":
            center = self.center if self.center is not None else list(theta_star)
            return QuadraticPseudoPenalty(self.alpha, center)
        return AlphaBhattacharyyaPseudoPenalty(self.alpha, truth, family, n)


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    certificates: str = "certificates.json"
    risk_json: str = "mc_risk.json"
    risk_csv: str = "mc_risk.csv"
    lemmas: str = "lemma_ledger.json"
    replay_dir: str = "replay"


class ExperimentConfig(BaseModel):
    """
    Validated experiment description.

    @help.title ExperimentConfig Model
    @help.description ``certificates`` is "all-applicable" or a non-empty list of theorem ids.
    ``alpha`` drives the Bhattacharyya certificates, ``quadratic_alpha`` the quadratic one and
    ``penalty_alpha`` the penalty-as-pseudo-penalty one. ``decay_constant`` overrides the
    computed Gaussian decay constant (recorded as asserted).
    """

    model_config = ConfigDict(extra="forbid")

    family: str
    dim: int = Field(default=1, ge=1)
    theta_star: Optional[List[float]] = None
    sample_path: Optional[str] = None
    # @help.description CSV or whitespace-separated file of observations, one per row
    grid: GridSpec
    penalty: PenaltySpec = Field(default_factory=PenaltySpec)
    pseudo: PseudoSpec = Field(default_factory=PseudoSpec)
    n: List[int] = Field(min_length=1)
    reps: Optional[int] = Field(default=None, ge=2)
    seed: Optional[int] = None
    certificates: Union[Literal["all-applicable"], List[TheoremId]] = ALL_APPLICABLE
    alpha: float = Field(default=0.5, ge=0.0, lt=1.0)
    quadratic_alpha: float = Field(default=1.0, gt=0.0)
    penalty_alpha: float = Field(default=1.0, ge=0.0)
    decay_constant: Optional[float] = Field(default=None, gt=0.0)
    t: Optional[float] = Field(default=None, ge=0.0)
    outputs: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("n")
    @classmethod
    def _positive_sizes(cls, sizes: List[int]) -> List[int]:
        if any(size < 1 for size in sizes):
            raise ValueError("every sample size must be >= 1")
        return sizes

    @field_validator("certificates")
    @classmethod
    def _non_empty(cls, value):
        if isinstance(value, list) and not value:
            raise ValueError("certificate list is empty")
        return value

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        get_family(self.family, self.dim)
        if self.theta_star is None and self.sample_path is None:
            raise ValueError("give theta_star or sample_path")
        if self.theta_star is not None and len(self.theta_star) != self.dim:
            raise ValueError(f"theta_star must have {self.dim} entries")
        if self.grid.dim != self.dim:
            raise ValueError(f"grid box must have {self.dim} coordinates")
        return self

    def build_family(self) -> ParametricFamily:
        return get_family(self.family, self.dim)

    def requested(self) -> List[TheoremId]:
        if self.certificates == ALL_APPLICABLE:
            return list(TheoremId)
        return list(dict.fromkeys(self.certificates))

    def load_sample(self, base: Optional[Path] = None) -> DataSample:
        path = Path(self.sample_path)
        if base is not None and not path.is_absolute():
            path = base / path
        delimiter = "," if path.suffix.lower() == ".csv" else None
        points = np.loadtxt(path, delimiter=delimiter, ndmin=2)
        if points.shape[1] != self.dim:
            raise ValueError(f"sample file has {points.shape[1]} columns, expected {self.dim}")
        return DataSample.external(points)


def validation_messages(exc: ValidationError) -> List[str]:
    """One ``field.path: message`` line per validation error."""
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error.get("loc", ())) or "<root>"
        lines.append(f"{location}: {error['msg']}")
    return lines


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Reads and validates a JSON experiment file; raises pydantic.ValidationError or OSError."""
    text = Path(path).read_text(encoding="utf-8")
    return ExperimentConfig.model_validate_json(text)
