"""Finite-sample Lloyd iterations in R^d plus derivative diagnostics of the cost.

Points are an (n, d) array and centers a (k, d) array; 1-D inputs are
promoted to a single column. The cost carries a factor 1/2, so its gradient
with respect to center k is ``sum_{i in C_k} (c_k - X_i)`` and its Hessian is
block diagonal with entries ``N_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import DomainError, NondifferentiableError, SingularHessianError


def as_points(x) -> np.ndarray:
    """Return ``x`` as a C-contiguous float (n, d) array."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] == 0:
        raise DomainError(f"expected a nonempty (n, d) array, got shape {np.shape(x)}")
    return np.ascontiguousarray(a)


def _prep(data, c) -> tuple[np.ndarray, np.ndarray]:
    X = as_points(data)
    C = as_points(c)
    if X.shape[1] != C.shape[1]:
        raise DomainError(f"dimension mismatch: data d={X.shape[1]}, centers d={C.shape[1]}")
    return X, C


@dataclass(frozen=True)
class Assignment:
    labels: np.ndarray
    counts: np.ndarray

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass
class RunResult:
    centers: np.ndarray
    assignment: Assignment
    cost: float
    trajectory: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def assign(data, c) -> Assignment:
    """Label each point with its nearest center (ties go to the lowest index)."""
    X, C = _prep(data, c)
    labels, _ = _accel.assign(X, C)
    return Assignment(labels, np.bincount(labels, minlength=C.shape[0]))


def lloyd_step(data, c) -> tuple[np.ndarray, Assignment]:
    """Move every nonempty cluster's center to its mean; empty clusters stay put."""
    X, C = _prep(data, c)
    labels, _ = _accel.assign(X, C)
    new, counts = _accel.update(X, labels, C)
    return new, Assignment(labels, counts)


def cost(data, c) -> float:
    X, C = _prep(data, c)
    _, d2 = _accel.assign(X, C)
    return 0.5 * float(np.sum(d2))


def _pair_gaps(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # (n, k, k) equidistance gaps; NaN on the diagonal and for coincident centers.
    k = C.shape[0]
    if X.shape[1] == 1:
        mid = 0.5 * (C[:, 0][:, None] + C[:, 0][None, :])
        gaps = np.abs(X[:, 0][:, None, None] - mid[None])
    else:
        dist = np.sqrt(((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2))
        gaps = np.abs(dist[:, :, None] - dist[:, None, :])
    same = np.all(C[:, None, :] == C[None, :, :], axis=2) | np.eye(k, dtype=bool)
    gaps[:, same] = np.nan
    return gaps


def on_boundary(data, c, tol: float = 1e-12, active_only: bool = False) -> bool:
    """True if some point is within ``tol`` of equidistance from two distinct centers.

    In one dimension the test is ``|X_i - (c_k + c_l)/2| <= tol``; otherwise
    ``| |X_i - c_k| - |X_i - c_l| | <= tol``. With ``active_only`` only ties
    involving a point's nearest center count, which are the ones where the
    cost actually loses differentiability.
    """
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    X, C = _prep(data, c)
    if C.shape[0] < 2:
        return False
    gaps = _pair_gaps(X, C)
    if active_only:
        labels, _ = _accel.assign(X, C)
        gaps = gaps[np.arange(X.shape[0]), labels]
    with np.errstate(invalid="ignore"):
        return bool(np.any(gaps <= tol))


def gradient(data, c, tol: float = 1e-12) -> np.ndarray:
    """Per-center gradient ``sum_{i in C_k} (c_k - X_i)`` as a (k, d) array."""
    X, C = _prep(data, c)
    if on_boundary(X, C, tol, active_only=True):
        raise NondifferentiableError("a data point is equidistant from its two nearest centers")
    labels, _ = _accel.assign(X, C)
    g = np.zeros_like(C)
    np.add.at(g, labels, C[labels] - X)
    return g


def hessian_diagonal(data, c) -> np.ndarray:
    """Cluster sizes N_k; the Hessian is ``N_k * I_d`` in block k and zero elsewhere."""
    return assign(data, c).counts


def hessian(data, c) -> np.ndarray:
    """Dense (k*d, k*d) Hessian, center-major ordering."""
    X, C = _prep(data, c)
    counts = hessian_diagonal(X, C)
    return np.diag(np.repeat(counts.astype(float), C.shape[1]))


def newton_step(data, c, tol: float = 1e-12) -> np.ndarray:
    X, C = _prep(data, c)
    g = gradient(X, C, tol)
    counts = hessian_diagonal(X, C)
    if np.any(counts == 0):
        raise SingularHessianError(f"empty clusters {np.flatnonzero(counts == 0).tolist()}")
    return C - g / counts[:, None]


def run(data, c0, max_iter: int = 300, store_trajectory: bool = True) -> RunResult:
    """Lloyd iterations until the assignment stops changing or ``max_iter`` steps."""
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    X, C = _prep(data, c0)
    traj = [C.copy()] if store_trajectory else []
    labels, _ = _accel.assign(X, C)
    converged = False
    it = 0
    while it < max_iter:
        C, counts = _accel.update(X, labels, C)
        it += 1
        if store_trajectory:
            traj.append(C.copy())
        new_labels, _ = _accel.assign(X, C)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    labels, d2 = _accel.assign(X, C)
    asg = Assignment(labels, np.bincount(labels, minlength=C.shape[0]))
    return RunResult(C, asg, 0.5 * float(d2.sum()), traj, it, converged)


def trajectory_cost_profile(data, c_t, c_next, n_alpha: int = 17) -> list[tuple[float, float]]:
    """Cost along the segment from ``c_t`` to ``c_next`` at evenly spaced alphas."""
    if n_alpha < 2:
        raise DomainError("n_alpha must be >= 2")
    X, A = _prep(data, c_t)
    _, B = _prep(X, c_next)
    return [(float(a), cost(X, (1.0 - a) * A + a * B)) for a in np.linspace(0.0, 1.0, n_alpha)]
