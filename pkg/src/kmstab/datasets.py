"""Axis-aligned Gaussian mixtures in R^d, the named benchmark models, and CSV I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .gmm1d import GaussianMixture1D


@dataclass(frozen=True)
class MixtureModel:
    """Gaussian mixture with diagonal covariances.

    ``means`` and ``variances`` are (K, d) arrays; variances are per-axis.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        var = np.broadcast_to(np.asarray(self.variances, dtype=float), mu.shape).copy()
        if w.ndim != 1 or w.size != mu.shape[0]:
            raise DomainError("one weight per component required")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must be positive and sum to 1, got {w.tolist()}")
        if np.any(var <= 0):
            raise DomainError("variances must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "variances", var)

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def min_separation(self) -> float:
        """Smallest distance between two means, in units of the largest standard deviation."""
        if self.K == 1:
            return 0.0
        diff = self.means[:, None, :] - self.means[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        dist[np.diag_indices(self.K)] = np.inf
        return float(dist.min() / np.sqrt(self.variances.max()))

    def sample(self, n: int, rng: np.random.Generator):
        """Draw ``n`` points; returns (points (n, d), component labels)."""
        labels = rng.choice(self.K, size=n, p=self.weights)
        X = self.means[labels] + np.sqrt(self.variances[labels]) * rng.standard_normal((n, self.d))
        return X, labels

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_gmm1d(cls, m: GaussianMixture1D, name: str = "gmm1d") -> "MixtureModel":
        mu = np.asarray(m.means)[:, None]
        return cls(np.asarray(m.weights), mu, np.full_like(mu, m.sigma**2), name)


_CROSS = [(-3.0, 3.0), (0.0, 0.0), (3.0, 3.0), (3.0, -3.0)]


def balanced2d() -> MixtureModel:
    return MixtureModel(np.full(4, 0.25), _CROSS, [0.2, 1.0], "balanced2d")


def imbalanced2d() -> MixtureModel:
    return MixtureModel([0.1, 0.5, 0.3, 0.1], _CROSS, [0.2, 1.0], "imbalanced2d")


def tendim10() -> MixtureModel:
    means = np.zeros((10, 10))
    means[:, 0] = np.arange(1, 11)
    return MixtureModel(np.full(10, 0.1), means, 0.05, "tendim10")


NAMED_MODELS = {"balanced2d": balanced2d, "imbalanced2d": imbalanced2d, "tendim10": tendim10}


def named_model(name: str) -> MixtureModel:
    try:
        return NAMED_MODELS[name]()
    except KeyError:
        raise DomainError(f"unknown model {name!r}; choose from {sorted(NAMED_MODELS)}") from None


class Dataset(NamedTuple):
    points: np.ndarray
    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def generate_dataset(model: MixtureModel, n: int, rng: np.random.Generator) -> Dataset:
    if n < 1:
        raise DomainError("n must be >= 1")
    return Dataset(*model.sample(n, rng))


def write_csv(ds: Dataset, path) -> None:
    """Write points and labels; ``repr`` keeps every float bit-exact on re-read."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{j}" for j in range(ds.d)] + ["label"])
        for row, lab in zip(ds.points, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])


def read_csv(path) -> Dataset:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = list(r)
    d = len(header) - 1
    pts = np.array([[float(v) for v in row[:d]] for row in rows]).reshape(len(rows), d)
    labels = np.array([int(row[d]) for row in rows], dtype=np.int64)
    return Dataset(pts, labels)
