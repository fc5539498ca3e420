"""
Numerical helpers shared by the models and bounds.

@help.category Utilities
@help.title Numerical Helpers
@help.description Central finite-difference Hessians, compensated sums and eigenvalue
extrema of matrix-valued functions over a box mesh.
"""
import itertools
import math
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from src.config.settings import get_settings
from src.utils.errors import EigenvalueError, SymmetryError


def fsum(values: Iterable[float]) -> float:
    """Compensated sum (math.fsum) accepting numpy arrays."""
    if isinstance(values, np.ndarray):
        return math.fsum(values.ravel().tolist())
    return math.fsum(values)


def fsum_columns(matrix: np.ndarray) -> np.ndarray:
    """Compensated column sums of an (n, d) array."""
    matrix = np.atleast_2d(matrix)
    return np.array([math.fsum(matrix[:, j].tolist()) for j in range(matrix.shape[1])])


def fd_steps(theta: np.ndarray, scale: Optional[float] = None) -> np.ndarray:
    """Per-coordinate step h = scale * (1 + |theta|)."""
    if scale is None:
        scale = get_settings().fd_step_scale
    return scale * (1.0 + np.abs(theta))


def central_hessian(
    func: Callable[[np.ndarray], float],
    theta: np.ndarray,
    scale: Optional[float] = None,
    symmetry_tol: float = 1e-8,
) -> np.ndarray:
    """
    Central finite-difference Hessian of ``func`` at ``theta``.

    Off-diagonal entries are computed for both (i, j) and (j, i) from the
    four-point stencil; the result is symmetrized after the asymmetry check.
    """
    theta = np.asarray(theta, dtype=float)
    d = theta.size
    h = fd_steps(theta, scale)
    f0 = func(theta)
    hess = np.empty((d, d))

    def shifted(i: int, si: float, j: Optional[int] = None, sj: float = 0.0) -> float:
        point = theta.copy()
        point[i] += si * h[i]
        if j is not None:
            point[j] += sj * h[j]
        return func(point)

    for i in range(d):
        hess[i, i] = (shifted(i, 1.0) - 2.0 * f0 + shifted(i, -1.0)) / (h[i] * h[i])
        for j in range(d):
            if j == i:
                continue
            hess[i, j] = (
                shifted(i, 1.0, j, 1.0)
                - shifted(i, 1.0, j, -1.0)
                - shifted(i, -1.0, j, 1.0)
                + shifted(i, -1.0, j, -1.0)
            ) / (4.0 * h[i] * h[j])

    asymmetry = float(np.max(np.abs(hess - hess.T))) if d > 1 else 0.0
    if asymmetry > symmetry_tol * max(1.0, float(np.max(np.abs(hess)))):
        raise SymmetryError(asymmetry, symmetry_tol)
    return 0.5 * (hess + hess.T)


def mesh_axis_points(d: int, points_per_axis: Optional[int] = None) -> int:
    """Points per axis; d > 2 keeps the mesh near 101**2 points in total."""
    if points_per_axis is None:
        points_per_axis = get_settings().hessian_mesh_points
    if d <= 2:
        return points_per_axis
    return max(3, int(round(points_per_axis ** (2.0 / d))))


def box_mesh(lower: np.ndarray, upper: np.ndarray, points_per_axis: Optional[int] = None) -> np.ndarray:
    """Regular mesh over a bounded box, corners included, shape (m, d)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("box mesh requires a bounded box")
    k = mesh_axis_points(lower.size, points_per_axis)
    axes = [np.linspace(lo, hi, k) if hi > lo else np.array([lo]) for lo, hi in zip(lower, upper)]
    return np.array(list(itertools.product(*axes)), dtype=float)


def eigen_extrema_on_mesh(
    hessian_batch: Callable[[np.ndarray], np.ndarray],
    lower: np.ndarray,
    upper: np.ndarray,
    points_per_axis: Optional[int] = None,
) -> Tuple[float, np.ndarray, float, np.ndarray]:
    """
    Smallest and largest eigenvalue of a matrix field over a box mesh.

    Returns (min_eig, argmin_location, max_eig, argmax_location).
    """
    mesh = box_mesh(lower, upper, points_per_axis)
    mats = np.asarray(hessian_batch(mesh), dtype=float)
    eigs = np.linalg.eigvalsh(mats)
    smallest = eigs[:, 0]
    largest = eigs[:, -1]
    if not (np.all(np.isfinite(smallest)) and np.all(np.isfinite(largest))):
        bad = int(np.argmax(~np.isfinite(smallest) | ~np.isfinite(largest)))
        raise EigenvalueError("non-finite eigenvalue on mesh", mesh[bad], float(smallest[bad]))
    i_min = int(np.argmin(smallest))
    i_max = int(np.argmax(largest))
    return float(smallest[i_min]), mesh[i_min], float(largest[i_max]), mesh[i_max]
