"""
Epsilon-discretizations of parameter boxes.

@help.category Grid
@help.title Epsilon Grid
@help.description The countable model searched by the estimator: the lattice v + eps Z^d
intersected with an axis-aligned box. Points are enumerated in lexicographic order of their
lattice index, which is also the estimator's tie-break order.
@help.example
    grid = EpsGrid.create(offset=0.0, eps=1.0, box=Box.cube(1, -1, 1))
    grid.enumerate_points()  # [[-1.], [0.], [1.]]
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.config.settings import get_settings
from src.models.base import Box
from src.utils.errors import DomainViolationError, LatticeCapError

logger = logging.getLogger(__name__)

# Slack when deciding whether a lattice point lies on a box face.
INDEX_TOL = 1e-9


class EpsGrid(BaseModel):
    """
    Grid v + eps Z^d intersected with ``box``.

    @help.title EpsGrid Model
    @help.description Immutable description of the lattice; an unbounded box describes the
    infinite lattice (enumeration then needs a radius).
    """

    model_config = ConfigDict(frozen=True)

    offset: Tuple[float, ...]
    # @help.description Offset v, one entry per coordinate
    eps: float
    # @help.description Spacing eps > 0
    box: Box
    # @help.description Bounding box; may be unbounded

    @model_validator(mode="after")
    def _check(self) -> "EpsGrid":
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ValueError("grid spacing eps must be positive and finite")
        if len(self.offset) != self.box.dim:
            raise ValueError("offset and box dimensions differ")
        return self

    @classmethod
    def create(cls, offset, eps: float, box: Box) -> "EpsGrid":
        offset = np.broadcast_to(np.asarray(offset, dtype=float), (box.dim,))
        return cls(offset=tuple(float(v) for v in offset), eps=float(eps), box=box)

    @classmethod
    def lattice(cls, d: int, eps: float, offset=0.0) -> "EpsGrid":
        """Infinite lattice v + eps Z^d."""
        return cls.create(offset, eps, Box.unbounded(d))

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def offset_array(self) -> np.ndarray:
        return np.asarray(self.offset, dtype=float)

    # ------------------------------------------------------------- geometry

    def index_ranges(self) -> List[Tuple[int, int]]:
        """Inclusive lattice index range per axis (bounded boxes only)."""
        if not self.box.bounded:
            raise ValueError("index ranges need a bounded box")
        ranges = []
        for v, lo, hi in zip(self.offset, self.box.lower, self.box.upper):
            m_lo = math.ceil((lo - v) / self.eps - INDEX_TOL)
            m_hi = math.floor((hi - v) / self.eps + INDEX_TOL)
            ranges.append((m_lo, m_hi))
        return ranges

    def axis_counts(self) -> List[int]:
        return [max(0, hi - lo + 1) for lo, hi in self.index_ranges()]

    def size(self) -> int:
        return math.prod(self.axis_counts())

    def point_of(self, index) -> np.ndarray:
        return self.offset_array + self.eps * np.asarray(index, dtype=float)

    def contains(self, theta) -> bool:
        """Membership in {v + eps m} intersected with the box."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            return False
        scaled = (theta - self.offset_array) / self.eps
        on_lattice = np.all(np.abs(scaled - np.round(scaled)) <= INDEX_TOL * np.maximum(1.0, np.abs(scaled)))
        return bool(on_lattice and self.box.contains(theta, tol=INDEX_TOL * self.eps))

    def hull(self) -> Box:
        """Convex hull of the grid points."""
        ranges = self.index_ranges()
        lower = tuple(float(v + self.eps * lo) for v, (lo, _) in zip(self.offset, ranges))
        upper = tuple(float(v + self.eps * hi) for v, (_, hi) in zip(self.offset, ranges))
        return Box(lower=lower, upper=upper)

    # ----------------------------------------------------------- enumeration

    def indices(self, cap: Optional[int] = None) -> np.ndarray:
        """Lattice indices in lexicographic order, shape (m, d)."""
        if cap is None:
            cap = get_settings().lattice_cap
        count = self.size()
        if count > cap:
            raise LatticeCapError(count, cap)
        if count == 0:
            return np.empty((0, self.dim), dtype=np.int64)
        axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in self.index_ranges()]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def enumerate_points(self, cap: Optional[int] = None) -> np.ndarray:
        """
        Grid points in lexicographic lattice-index order, shape (m, d).

        @help.title Enumerate Points
        @help.description Fails with LatticeCapError when the count exceeds the cap.
        """
        points = self.offset_array + self.eps * self.indices(cap).astype(float)
        logger.debug("enumerated %d grid points (eps=%g, d=%d)", points.shape[0], self.eps, self.dim)
        return points

    def points_near(self, center, radius: float, cap: Optional[int] = None) -> np.ndarray:
        """Grid points with ||theta - center|| < radius, lexicographic order."""
        center = np.asarray(center, dtype=float)
        if cap is None:
            cap = get_settings().lattice_cap
        axes = []
        for j in range(self.dim):
            lo = max(self.box.lower[j], center[j] - radius)
            hi = min(self.box.upper[j], center[j] + radius)
            m_lo = math.ceil((lo - self.offset[j]) / self.eps - INDEX_TOL)
            m_hi = math.floor((hi - self.offset[j]) / self.eps + INDEX_TOL)
            axes.append(np.arange(m_lo, m_hi + 1, dtype=np.int64))
        count = math.prod(len(a) for a in axes)
        if count > cap:
            raise LatticeCapError(count, cap)
        if count == 0:
            return np.empty((0, self.dim))
        mesh = np.meshgrid(*axes, indexing="ij")
        index = np.stack([m.ravel() for m in mesh], axis=1)
        points = self.offset_array + self.eps * index.astype(float)
        dist = np.linalg.norm(points - center, axis=1)
        return points[dist < radius]

    # --------------------------------------------------------------- rounding

    def nearest_index(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ValueError(f"theta must have dimension {self.dim}")
        half = 0.5 * self.eps
        for j in range(self.dim):
            if not (self.box.lower[j] - half <= theta[j] <= self.box.upper[j] + half):
                raise DomainViolationError(
                    j, float(theta[j]), (self.box.lower[j] - half, self.box.upper[j] + half)
                )
        scaled = (theta - self.offset_array) / self.eps
        # ties (scaled - 0.5 integral) go to the smaller index
        index = np.ceil(scaled - 0.5 - INDEX_TOL).astype(np.int64)
        if self.box.bounded:
            ranges = self.index_ranges()
            index = np.array([min(max(m, lo), hi) for m, (lo, hi) in zip(index, ranges)], dtype=np.int64)
        return index

    def nearest_point(self, theta) -> np.ndarray:
        """
        Grid point closest to theta in Euclidean distance.

        @help.title Nearest Point
        @help.description Requires theta within the box expanded by eps/2 per axis. Ties go to
        the lexicographically smaller lattice index.
        @help.example
            grid.nearest_point([0.5])  # [0.] on the unit lattice
        """
        return self.point_of(self.nearest_index(theta))

    def flat_index(self, index) -> int:
        """Position of a lattice index in enumeration order."""
        ranges = self.index_ranges()
        position = 0
        for m, (lo, hi) in zip(np.asarray(index, dtype=np.int64), ranges):
            if not lo <= m <= hi:
                raise ValueError("index outside grid")
            position = position * (hi - lo + 1) + int(m - lo)
        return position


def eps_from_rule(rule: str, n: int, constant: Optional[float] = None) -> float:
    """
    Spacing from a refinement rule: "sqrt(2/n)" or "const/sqrt(n)".

    @help.title Epsilon Rules
    @help.description Canonical refinements: eps = sqrt(2/n), or eps = C / sqrt(n).
    """
    if n < 1:
        raise ValueError("sample size n must be >= 1")
    if rule == "sqrt(2/n)":
        return math.sqrt(2.0 / n)
    if rule == "const/sqrt(n)":
        if constant is None or constant <= 0:
            raise ValueError("const/sqrt(n) rule needs a positive constant")
        return constant / math.sqrt(n)
    raise ValueError(f"Unsupported eps rule: {rule}")

