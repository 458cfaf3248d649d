"""k-means on the density of a 1-D Gaussian mixture (infinite-sample limit)."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from . import _accel
from .errors import DegenerateCellError, DegenerateInputError, DomainError
from .gmm1d import GaussianMixture1D, Interval, truncated_mixture_mean


class FixedPointResult(NamedTuple):
    centers: np.ndarray
    converged: bool
    iterations: int


def _check_sorted(c: np.ndarray) -> None:
    if c.ndim != 1 or c.size == 0:
        raise DegenerateInputError("centers must be a nonempty 1-D vector")
    if np.any(np.diff(c) <= 0):
        raise DegenerateInputError(f"centers must be strictly increasing, got {c.tolist()}")


def voronoi_cells(c: Sequence[float]) -> list[Interval]:
    """Cells of sorted 1-D centers, delimited by consecutive midpoints."""
    c = np.asarray(c, dtype=float)
    mids = 0.5 * (c[1:] + c[:-1])
    edges = np.concatenate([[-np.inf], mids, [np.inf]])
    return [Interval(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


def population_update(m: GaussianMixture1D, c: Sequence[float]) -> np.ndarray:
    """One Lloyd step on the mixture density: each center moves to its cell's center of mass."""
    c = np.asarray(c, dtype=float)
    _check_sorted(c)
    return np.array([truncated_mixture_mean(m, cell) for cell in voronoi_cells(c)])


def population_update_batch(m: GaussianMixture1D, centers: np.ndarray) -> np.ndarray:
    """Vectorised :func:`population_update` over rows of a (M, K') array.

    Rows must be nondecreasing; tied centers are allowed here (the midpoint
    rule still defines the cells). Used by the grid containment oracle.
    """
    centers = np.ascontiguousarray(centers, dtype=float)
    out = _accel.population_update_batch(
        np.asarray(m.weights), np.asarray(m.means), float(m.sigma), centers
    )
    if np.isnan(out).any():
        raise DegenerateCellError("a cell carries no mass")
    return out


def population_fixed_point(
    m: GaussianMixture1D,
    c0: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> FixedPointResult:
    """Iterate :func:`population_update` until the largest move drops below ``tol``.

    ``iterations`` counts the updates that were applied before the move fell
    below ``tol``; the final confirming update is not counted.
    """
    if not tol > 0 or max_iter < 1:
        raise DomainError("need tol > 0 and max_iter >= 1")
    c = np.asarray(c0, dtype=float)
    for it in range(max_iter):
        nxt = population_update(m, c)
        if np.max(np.abs(nxt - c)) < tol:
            return FixedPointResult(nxt, True, it)
        c = nxt
    return FixedPointResult(c, False, max_iter)
