"""Initialization schemes: uniform draws, fixed points, farthest-first, and pruned farthest-first."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import _accel
from .certify import InitParams, compute_init_params
from .datasets import MixtureModel
from .errors import DomainError, InsufficientCandidatesError
from .kmeans import as_points

SchemeKind = Literal["uniform", "deterministic", "mindiam", "pruned"]


def init_uniform(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """K data points drawn without replacement, in sampled order."""
    X = as_points(data)
    if not 1 <= k <= X.shape[0]:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={X.shape[0]}")
    return X[rng.choice(X.shape[0], size=k, replace=False)].copy()


def init_deterministic(points, k: int) -> np.ndarray:
    P = as_points(points)
    if P.shape[0] != k:
        raise DomainError(f"deterministic init carries {P.shape[0]} points, expected {k}")
    return P.copy()


def min_diam_select(candidates, k: int, rng: np.random.Generator, first: Optional[int] = None) -> np.ndarray:
    """Greedy farthest-first selection of ``k`` candidates, returned in selection order.

    The first pick is uniform over candidates (or the index ``first``); each
    further pick maximizes the distance to the nearest chosen one, with ties
    going to the lowest candidate index.
    """
    P = as_points(candidates)
    m = P.shape[0]
    if k < 1:
        raise DomainError("k must be >= 1")
    if k > m:
        raise InsufficientCandidatesError(f"{m} candidates cannot supply {k} centers")
    idx = int(rng.integers(m)) if first is None else int(first)
    chosen = [idx]
    nearest = np.sqrt(((P - P[idx]) ** 2).sum(axis=1))
    for _ in range(k - 1):
        masked = nearest.copy()
        masked[chosen] = -np.inf
        idx = int(np.argmax(masked))
        chosen.append(idx)
        nearest = np.minimum(nearest, np.sqrt(((P - P[idx]) ** 2).sum(axis=1)))
    return P[chosen].copy()


def init_min_diam(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """Farthest-first selection over all data points."""
    return min_diam_select(data, k, rng)


def pruned_min_diam(data, k: int, params: InitParams, rng: np.random.Generator):
    """Sample L points, take one Lloyd step, drop light clusters, then farthest-first select.

    Cluster mass is the empirical fraction of points in the cell of each
    sampled point; a cluster is dropped when that fraction is ``<= p0``.
    Returns ``(centers, diagnostics)``.
    """
    X = as_points(data)
    n = X.shape[0]
    if k < 2:
        raise DomainError("pruned selection needs k >= 2")
    if k > 1.0 / params.w_min + 1e-12:
        warnings.warn(f"k={k} exceeds 1/w_min={1.0 / params.w_min:.3g}", stacklevel=2)
    L = params.L
    capped = L > n
    if capped:
        warnings.warn(f"L={L} exceeds n={n}; using L=n", stacklevel=2)
        L = n
    c0 = X[rng.choice(n, size=L, replace=False)].copy()
    labels, _ = _accel.assign(X, c0)
    c1, counts = _accel.update(X, labels, c0)
    mass = counts / n
    keep = mass > params.p0
    diag = {
        "L": L,
        "L_capped": capped,
        "survivors": int(keep.sum()),
        "pruned_masses": mass[~keep].tolist(),
        "survivor_masses": mass[keep].tolist(),
    }
    if keep.sum() < k:
        raise InsufficientCandidatesError(f"only {int(keep.sum())} clusters survive pruning, need {k}")
    return min_diam_select(c1[keep], k, rng), diag


@dataclass(frozen=True)
class InitScheme:
    """Initialization choice. A deterministic scheme without ``points`` asks the
    stability protocols to draw K' fixed points from the model."""

    kind: SchemeKind
    points: Optional[tuple] = None
    params: Optional[InitParams] = None

    def __post_init__(self):
        if self.kind not in ("uniform", "deterministic", "mindiam", "pruned"):
            raise DomainError(f"unknown init scheme {self.kind!r}")
        if self.kind == "pruned" and self.params is None:
            raise DomainError("pruned init needs InitParams")

    def initialize(self, data, k: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform":
            return init_uniform(data, k, rng)
        if self.kind == "deterministic":
            if self.points is None:
                raise DomainError("deterministic init needs points")
            return init_deterministic(self.points, k)
        if self.kind == "mindiam":
            return init_min_diam(data, k, rng)
        return pruned_min_diam(data, k, self.params, rng)[0]


def init_params_for(model, delta_miss: float = 0.02, tau: float = 0.015) -> InitParams:
    """InitParams from a mixture's smallest weight and separation (in largest-sd units)."""
    if not isinstance(model, MixtureModel):
        model = MixtureModel.from_gmm1d(model)
    return compute_init_params(float(model.weights.min()), model.min_separation, delta_miss, tau)
