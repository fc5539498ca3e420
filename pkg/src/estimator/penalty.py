"""
Penalties and pseudo-penalties.

@help.category Estimator
@help.title Penalties
@help.description The penalty L enters the estimator's objective; a pseudo-penalty only enters
the risk bound. Both are evaluated on arrays of grid points. Variants follow one abstract
interface each so certificates can treat them uniformly.
@help.example
    penalty = CodelengthPenalty.uniform(grid, mode="twice")
    penalty.evaluate(grid.enumerate_points())
"""
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.grid.lattice import EpsGrid
from src.models.base import ParametricFamily, TrueDistribution
from src.models.divergences import bhattacharyya_from_affinity
from src.utils.numerics import fsum

CODELENGTH_MODES = ("twice", "map")
PMF_TOLERANCE = 1e-12


class Penalty(ABC):
    """
    Abstract penalty on grid points.

    @help.title Penalty Class
    @help.description Subclasses implement evaluate(points) -> values. ``hessian`` returns the
    Hessian of a twice-differentiable penalty, or None when it has none.
    """

    kind: str = "penalty"

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Penalty at each row of ``points``."""

    def value(self, theta) -> float:
        return float(self.evaluate(np.atleast_2d(np.asarray(theta, dtype=float)))[0])

    def hessian(self, theta: np.ndarray) -> Optional[np.ndarray]:
        return None

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class ZeroPenalty(Penalty):
    kind = "zero"

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.atleast_2d(points).shape[0])

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        d = np.asarray(theta).size
        return np.zeros((d, d))


class ConstantPenalty(Penalty):
    kind = "constant"

    def __init__(self, constant: float):
        if not math.isfinite(constant):
            raise ValueError("constant penalty must be finite")
        self.constant = float(constant)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(points).shape[0], self.constant)

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        d = np.asarray(theta).size
        return np.zeros((d, d))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "value": self.constant}


class SquaredNormPenalty(Penalty):
    """L(theta) = ||theta||^2."""

    kind = "squared-norm"

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.sum(points * points, axis=1)

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        return 2.0 * np.eye(np.asarray(theta).size)


class _GridIndexed:
    """Lookup of per-point values stored in grid enumeration order."""

    def __init__(self, grid: EpsGrid, values: np.ndarray, label: str):
        values = np.asarray(values, dtype=float).ravel()
        if values.size != grid.size():
            raise ValueError(f"{label} must cover every grid point: got {values.size}, grid has {grid.size()}")
        self.grid = grid
        self.values = values
        self._ranges = np.array(grid.index_ranges(), dtype=np.int64)

    def lookup(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        index = np.rint((points - self.grid.offset_array) / self.grid.eps).astype(np.int64)
        lo, hi = self._ranges[:, 0], self._ranges[:, 1]
        if np.any(index < lo) or np.any(index > hi):
            raise ValueError("point outside the grid of a tabulated penalty")
        widths = hi - lo + 1
        position = np.zeros(points.shape[0], dtype=np.int64)
        for j in range(points.shape[1]):
            position = position * widths[j] + (index[:, j] - lo[j])
        return self.values[position]


class TablePenalty(Penalty):
    """Explicit value for every grid point (enumeration order)."""

    kind = "table"

    def __init__(self, grid: EpsGrid, values: Sequence[float]):
        self._table = _GridIndexed(grid, np.asarray(values, dtype=float), "table penalty")
        self.grid = grid

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self._table.lookup(points)

    @property
    def values(self) -> np.ndarray:
        return self._table.values

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "size": int(self._table.values.size)}


class CodelengthPenalty(Penalty):
    """
    L = 2 log(1/q) ("twice") or log(1/q) ("map") for a pmf q over the grid.

    @help.title Codelength Penalty
    @help.description "twice" is twice a codelength and satisfies the twice-Kraft condition with
    equality; "map" is the MAP penalty with prior q.
    """

    kind = "codelength"

    def __init__(self, grid: EpsGrid, pmf: Sequence[float], mode: str = "twice"):
        if mode not in CODELENGTH_MODES:
            raise ValueError(f"Unsupported codelength mode: {mode}. Supported: {', '.join(CODELENGTH_MODES)}")
        pmf = np.asarray(pmf, dtype=float).ravel()
        if np.any(pmf < 0.0):
            raise ValueError("pmf entries must be non-negative")
        total = fsum(pmf)
        if abs(total - 1.0) > PMF_TOLERANCE:
            raise ValueError(f"pmf must sum to 1 within {PMF_TOLERANCE:g}, got {total!r}")
        self.mode = mode
        self.grid = grid
        with np.errstate(divide="ignore"):
            log_reciprocal = -np.log(pmf)
        factor = 2.0 if mode == "twice" else 1.0
        self._table = _GridIndexed(grid, factor * log_reciprocal, "pmf")
        self.pmf = pmf

    @classmethod
    def uniform(cls, grid: EpsGrid, mode: str = "twice") -> "CodelengthPenalty":
        m = grid.size()
        return cls(grid, np.full(m, 1.0 / m), mode)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self._table.lookup(points)

    def log_reciprocal(self, points: np.ndarray) -> np.ndarray:
        """log(1/q) whatever the mode."""
        values = self._table.lookup(points)
        return values / 2.0 if self.mode == "twice" else values

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "mode": self.mode, "size": int(self.pmf.size)}


class AdaptivePenalty:
    """
    Two-part penalty L(k, theta) = L0(k) + L_k(theta) over a list of models k = 1..K.

    @help.title Adaptive Penalty
    @help.description Each model is a (grid, penalty) pair; L0 charges for the model index.
    """

    kind = "adaptive"

    def __init__(self, l0: Sequence[float], per_model: Optional[List[Tuple[EpsGrid, Penalty]]] = None,
                 class_kraft_sum: Optional[float] = None):
        self.l0 = np.asarray(l0, dtype=float)
        self.per_model = list(per_model) if per_model is not None else []
        if self.per_model and len(self.per_model) != self.l0.size:
            raise ValueError("one L0 value per model is required")
        self.class_kraft_sum = class_kraft_sum

    @property
    def model_count(self) -> int:
        return int(self.l0.size)

    @property
    def twice_kraft_ok(self) -> bool:
        return self.class_kraft_sum is not None and self.class_kraft_sum <= 1.0

    def value(self, k: int, theta) -> float:
        """L0(k) + L_k(theta) for 1-based model index k."""
        if not self.per_model:
            raise ValueError("adaptive penalty has no per-model penalties")
        grid, penalty = self.per_model[k - 1]
        return float(self.l0[k - 1]) + penalty.value(theta)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "models": self.model_count, "l0": self.l0.tolist()}


# --------------------------------------------------------------- pseudo-penalties


class PseudoPenalty(ABC):
    """
    Abstract pseudo-penalty L on grid points; it never affects the estimator.

    @help.title Pseudo-Penalty Class
    """

    kind: str = "pseudo"

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        ...

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class ZeroPseudoPenalty(PseudoPenalty):
    kind = "zero"

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.atleast_2d(points).shape[0])


class AlphaBhattacharyyaPseudoPenalty(PseudoPenalty):
    """L(theta) = alpha n D_B(P, P_theta); exp(-L/2) = A^(alpha n)."""

    kind = "alpha-bhattacharyya"

    def __init__(self, alpha: float, truth: TrueDistribution, family: ParametricFamily, n: int):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if n < 1:
            raise ValueError("sample size n must be >= 1")
        self.alpha = float(alpha)
        self.truth = truth
        self.family = family
        self.n = int(n)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        affinity = self.truth.affinity_to(self.family, np.atleast_2d(points))
        return self.alpha * self.n * bhattacharyya_from_affinity(affinity)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "alpha": self.alpha, "n": self.n}


class EntropyCodelengthPseudoPenalty(PseudoPenalty):
    """L(theta) = 2 log(1/q(theta)) with q the pmf of the estimator."""

    kind = "entropy-codelength"

    def __init__(self, grid: EpsGrid, pmf: Sequence[float]):
        pmf = np.asarray(pmf, dtype=float)
        with np.errstate(divide="ignore"):
            self._table = _GridIndexed(grid, -2.0 * np.log(pmf), "estimator pmf")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self._table.lookup(points)


class QuadraticPseudoPenalty(PseudoPenalty):
    """L(theta) = alpha ||theta - center||^2."""

    kind = "quadratic"

    def __init__(self, alpha: float, center: Sequence[float]):
        if alpha < 0.0:
            raise ValueError("alpha must be non-negative")
        self.alpha = float(alpha)
        self.center = np.asarray(center, dtype=float)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        diff = np.atleast_2d(points) - self.center
        return self.alpha * np.sum(diff * diff, axis=1)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "alpha": self.alpha, "center": self.center.tolist()}


class AlphaTimesPenaltyPseudoPenalty(PseudoPenalty):
    """L = alpha * penalty."""

    kind = "alpha-penalty"

    def __init__(self, alpha: float, penalty: Penalty):
        if alpha < 0.0:
            raise ValueError("alpha must be non-negative")
        self.alpha = float(alpha)
        self.penalty = penalty

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.alpha * self.penalty.evaluate(points)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "alpha": self.alpha, "penalty": self.penalty.describe()}


class TablePseudoPenalty(PseudoPenalty):
    kind = "table"

    def __init__(self, grid: EpsGrid, values: Sequence[float]):
        self._table = _GridIndexed(grid, np.asarray(values, dtype=float), "table pseudo-penalty")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self._table.lookup(points)
