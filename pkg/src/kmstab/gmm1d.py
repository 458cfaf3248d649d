"""Closed-form numerics for 1-D Gaussians and shared-variance Gaussian mixtures.

All truncated moments are evaluated in closed form; interval masses are
computed from whichever tail avoids cancellation, so cells far out in a tail
keep full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCellError, DomainError

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Above this the upper tail mass underflows relative to the density.
_R_OVERFLOW = 37.0


def normal_pdf(x: float) -> float:
    if math.isinf(x):
        return 0.0
    return INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_cdf(x: float) -> float:
    """Standard normal cdf via the complementary error function.

    Relative accuracy is kept in the lower tail; ``normal_cdf(-x)`` gives the
    upper tail without cancellation.
    """
    return 0.5 * math.erfc(-x / SQRT2)


def normal_quantile(p: float, tol: float = 1e-12) -> float:
    """Inverse of :func:`normal_cdf` by safeguarded Newton iteration.

    Newton runs on ``log Phi(x) - log p`` for the lower half, which converges
    quickly even deep in the tail; the upper half uses the reflection
    ``q(p) = -q(1 - p)``. A bisection bracket guards every step.
    """
    if not (0.0 < p < 1.0) or math.isnan(p):
        raise DomainError(f"quantile needs p in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -normal_quantile(1.0 - p, tol)
    target = math.log(p)
    lo, hi = -40.0, 0.0
    # Tail asymptotics give a starting point within a few percent.
    x = -math.sqrt(max(-2.0 * target - math.log(-4.0 * math.pi * target), 0.0)) if p < 0.1 else -0.5
    x = min(max(x, lo), hi)
    for _ in range(200):
        cdf = normal_cdf(x)
        g = math.log(cdf) - target
        if g > 0:
            hi = x
        else:
            lo = x
        step = g * cdf / normal_pdf(x)
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol:
            return x_new
        x = x_new
    return x


def h_function(x: float, y: float) -> float:
    """H(x, y) = x Phi(y - x) - phi(y - x).

    For a Gaussian with mean ``mu`` and scale ``s``,
    ``integral_{-inf}^{h} (u - mu + alpha) dN(u) = s * H(alpha/s, (h + alpha - mu)/s)``.
    """
    z = y - x
    return x * normal_cdf(z) - normal_pdf(z)


def tail_cutoff_d(t: float) -> float:
    """Point whose standard normal upper-tail mass is ``t``."""
    if not (0.0 < t < 1.0):
        raise DomainError(f"tail probability must lie in (0, 1), got {t!r}")
    return -normal_quantile(t)


def tail_center_of_mass_r(x: float) -> float:
    """Mean of the standard normal truncated to [x, inf) (inverse Mills ratio)."""
    if x >= _R_OVERFLOW:
        raise OverflowError(f"tail mass underflows for x={x!r} (limit {_R_OVERFLOW})")
    return normal_pdf(x) / normal_cdf(-x)


def std_interval_mass(a: float, b: float) -> float:
    """Phi(b) - Phi(a) for a <= b, evaluated from the tail that avoids cancellation."""
    if a > 0.0:
        return normal_cdf(-a) - normal_cdf(-b)
    if b < 0.0:
        return normal_cdf(b) - normal_cdf(a)
    return 1.0 - normal_cdf(-b) - normal_cdf(a)


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise DomainError(f"invalid interval [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def disjoint(self, other: "Interval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class GaussianMixture1D:
    """Mixture of K Gaussians with sorted means and one shared scale."""

    weights: tuple[float, ...]
    means: tuple[float, ...]
    sigma: float = 1.0

    def __init__(self, weights: Sequence[float], means: Sequence[float], sigma: float = 1.0):
        w = tuple(float(v) for v in weights)
        mu = tuple(float(v) for v in means)
        if len(w) == 0 or len(w) != len(mu):
            raise DomainError("weights and means must be nonempty and of equal length")
        if any(v <= 0 for v in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError(f"weights must be positive and sum to 1, got {w}")
        if any(b < a for a, b in zip(mu, mu[1:])):
            raise DomainError(f"means must be sorted, got {mu}")
        if not sigma > 0:
            raise DomainError(f"sigma must be positive, got {sigma}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "sigma", float(sigma))

    @classmethod
    def two_component(cls, w1: float, delta: float, sigma: float = 1.0, mu1: float = 0.0):
        """Two components at ``mu1`` and ``mu1 + delta`` (delta in units of sigma)."""
        return cls((w1, 1.0 - w1), (mu1, mu1 + delta * sigma), sigma)

    @property
    def K(self) -> int:
        return len(self.weights)

    @property
    def delta(self) -> float:
        """Minimum gap between consecutive means (0 for K = 1)."""
        if self.K == 1:
            return 0.0
        return min(b - a for a, b in zip(self.means, self.means[1:]))

    @property
    def delta_max(self) -> float:
        if self.K == 1:
            return 0.0
        return max(b - a for a, b in zip(self.means, self.means[1:]))

    @property
    def mean(self) -> float:
        return math.fsum(w * m for w, m in zip(self.weights, self.means))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, m in zip(self.weights, self.means):
            out += w * np.exp(-0.5 * ((x - m) / self.sigma) ** 2)
        return out * INV_SQRT_2PI / self.sigma

    def cdf(self, x: float) -> float:
        return math.fsum(w * normal_cdf((x - m) / self.sigma) for w, m in zip(self.weights, self.means))

    def sample(self, n: int, rng: np.random.Generator):
        """Draw ``n`` points; returns (points, component labels)."""
        labels = rng.choice(self.K, size=n, p=np.asarray(self.weights))
        x = np.asarray(self.means)[labels] + self.sigma * rng.standard_normal(n)
        return x, labels


def _component_moments(m: GaussianMixture1D, c: Interval):
    for w, mu in zip(m.weights, m.means):
        a = (c.lo - mu) / m.sigma
        b = (c.hi - mu) / m.sigma
        mass = std_interval_mass(a, b)
        first = mu * mass + m.sigma * (normal_pdf(a) - normal_pdf(b))
        yield w, mass, first


def mixture_mass(m: GaussianMixture1D, c: Interval) -> float:
    return math.fsum(w * mass for w, mass, _ in _component_moments(m, c))


def truncated_mixture_mean(m: GaussianMixture1D, c: Interval) -> float:
    """Center of mass of the mixture restricted to ``c``."""
    parts = list(_component_moments(m, c))
    tot = math.fsum(w * mass for w, mass, _ in parts)
    if tot <= 0.0:
        raise DegenerateCellError(f"interval [{c.lo}, {c.hi}] carries no mass")
    num = math.fsum(w * first for w, _, first in parts)
    return min(max(num / tot, c.lo), c.hi)
