"""Stable-region certificates for 1-D two-component mixtures and the
parameter/purity formulas behind the pruned MinDiam initialization.

Lengths passed to the certificates are in units of sigma. Every inequality is
rewritten as ``slack >= 0``; a region is certified when all slacks are
nonnegative.

Certificate modes
-----------------
``"corrected"`` (default) evaluates the exact worst-case condition for each
of the region's faces. ``"as_printed"`` keeps the published forms of the two
inequalities that disagree with the exact ones:

* square, upper bound on the first center's lower face ("10") and on the
  upper face ("11") of the second center;
* prism, lower face of the third center ("6").

The remaining inequalities are identical in both modes. The corrected
square certificate also carries an ordering condition ``"order"``
(``a <= delta / 2``): a wider square contains states with the first center to
the right of the second, and those always escape through the second center's
lower face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .errors import AssumptionViolation, DomainError, InvalidRegionError
from .gmm1d import (
    GaussianMixture1D,
    Interval,
    h_function as H,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    tail_center_of_mass_r,
    tail_cutoff_d,
)
from .population import population_update_batch

Mode = Literal["corrected", "as_printed"]
RegionKind = Literal["square_k2", "prism_k3", "prism_k3_mirrored"]


@dataclass(frozen=True)
class RegionSpec:
    """A candidate stable region, in units of sigma around the two means."""

    kind: RegionKind
    a: float
    b: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("square_k2", "prism_k3", "prism_k3_mirrored"):
            raise InvalidRegionError(f"unknown region kind {self.kind!r}")
        if not self.a > 0:
            raise InvalidRegionError("a must be positive")
        if self.kind != "square_k2":
            if not self.b > 0:
                raise InvalidRegionError("b must be positive")
            if not 0 < self.epsilon < 2 * self.a:
                raise InvalidRegionError(f"need 0 < epsilon < 2a, got epsilon={self.epsilon}, a={self.a}")

    @property
    def dim(self) -> int:
        return 2 if self.kind == "square_k2" else 3

    def box(self, mu1: float, mu2: float, sigma: float = 1.0) -> list[tuple[float, float]]:
        """Per-coordinate bounds in data units. The prisms also require sorted coordinates."""
        a, b, e = self.a * sigma, self.b * sigma, self.epsilon * sigma
        if self.kind == "square_k2":
            return [(mu1 - a, mu1 + a), (mu2 - a, mu2 + a)]
        if self.kind == "prism_k3":
            return [(mu1 - a, mu1 + a - e), (mu1 - a + e, mu1 + a), (mu2 - b, mu2 + b)]
        return [(mu1 - b, mu1 + b), (mu2 - a, mu2 + a - e), (mu2 - a + e, mu2 + a)]


@dataclass(frozen=True)
class Certificate:
    stable: bool
    slacks: tuple[float, ...]
    labels: tuple[str, ...]
    mode: str = "corrected"

    @property
    def min_slack(self) -> float:
        return min(self.slacks)

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "mode": self.mode,
            "inequalities": [{"eq": lab, "slack": s, "holds": s >= 0} for lab, s in zip(self.labels, self.slacks)],
        }


def _make(labels, slacks, mode) -> Certificate:
    slacks = tuple(float(s) for s in slacks)
    return Certificate(all(s >= 0 for s in slacks), slacks, tuple(labels), mode)


def _check_common(w1: float, delta: float, a: float) -> None:
    if not 0 < w1 < 1:
        raise DomainError(f"w1 must lie in (0, 1), got {w1}")
    if not delta > 0 or not a > 0:
        raise DomainError("delta and a must be positive")


def certify_square_k2(w1: float, delta: float, a: float, mode: Mode = "corrected") -> Certificate:
    """Check whether the square of half-width ``a`` around (mu1, mu2) maps into itself.

    In ``"corrected"`` mode the conditions are necessary and sufficient.
    """
    _check_common(w1, delta, a)
    w2 = 1.0 - w1
    D = delta
    # first center stays >= mu1 - a; worst cell edge at (mu1 - a + mu2 - a) / 2
    s8 = w1 * H(a, D / 2) + w2 * H(a + D, D / 2)
    # first center stays <= mu1 + a; worst cell edge at (mu1 + a + mu2 + a) / 2
    s9 = -(w1 * H(-a, D / 2) + w2 * H(D - a, D / 2))
    if mode == "corrected":
        s10 = (a - w1 * D) - (w1 * H(a - D, -D / 2) + w2 * H(a, -D / 2))
        s11 = (w1 * H(-a - D, -D / 2) + w2 * H(-a, -D / 2)) + a + w1 * D
    elif mode == "as_printed":
        s10 = w1 * H(a - D, -D / 2) + w2 * H(a, D / 2)
        s11 = -(w1 * H(-a - D, -D / 2) + w2 * H(-a, -D / 2))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "corrected":
        return _make(("8", "9", "10", "11", "order"), (s8, s9, s10, s11, D / 2 - a), mode)
    return _make(("8", "9", "10", "11"), (s8, s9, s10, s11), mode)


def certify_prism_k3(
    w1: float,
    delta: float,
    a: float,
    b: float,
    epsilon: float,
    mode: Mode = "corrected",
    mirrored: bool = False,
) -> Certificate:
    """Check whether the prism (two centers near mu1, one near mu2) maps into itself.

    ``mirrored=True`` certifies the reflected prism (one center near mu1, two
    near mu2) for weight ``w1``; by reflection of the line this is the direct
    prism for weight ``1 - w1``.
    """
    _check_common(w1, delta, a)
    RegionSpec("prism_k3", a, b, epsilon)
    if mirrored:
        w1 = 1.0 - w1
    w2 = 1.0 - w1
    D, e = delta, epsilon

    s2 = w1 * H(a, e / 2) + w2 * H(a + D, e / 2)
    s3 = -(w1 * H(-a + e, e / 2) + w2 * H(-a + D + e, e / 2))

    y4 = (a - b + D - e) / 2
    s4 = (w1 * H(a - e, y4) + w2 * H(a - e + D, y4)) - (w1 * H(a - e, -e / 2) + w2 * H(a - e + D, -e / 2))

    y5 = (b - a + D) / 2
    s5 = (w1 * H(-a, -e / 2) + w2 * H(D - a, -e / 2)) - (w1 * H(-a, y5) + w2 * H(-a + D, y5))

    y6 = (b - a - D + e) / 2
    if mode == "corrected":
        lhs6 = w1 * H(b - D, y6) + w2 * H(b, y6)
    elif mode == "as_printed":
        lhs6 = w1 * H(b - D, y6) + w2 * H(b - D, y6)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    s6 = (b - w1 * D) - lhs6

    y7 = (a - b - D) / 2
    s7 = (w1 * H(-b - D, y7) + w2 * H(-b, y7)) + b + w1 * D

    return _make(("2", "3", "4", "5", "6", "7"), (s2, s3, s4, s5, s6, s7), mode)


def certify(region: RegionSpec, w1: float, delta: float, mode: Mode = "corrected") -> Certificate:
    if region.kind == "square_k2":
        return certify_square_k2(w1, delta, region.a, mode)
    return certify_prism_k3(
        w1, delta, region.a, region.b, region.epsilon, mode, mirrored=region.kind == "prism_k3_mirrored"
    )


class OracleResult(NamedTuple):
    contained: bool
    witness: np.ndarray | None
    n_checked: int


def containment_oracle(m: GaussianMixture1D, region: RegionSpec, grid_per_axis: int = 21) -> OracleResult:
    """Brute-force check of one-step invariance on a uniform grid of the region.

    Every grid point of the region (corners included) is pushed through one
    population update; the region is reported contained when all images stay
    inside. Centers keep their identity, so an unsorted square point is
    updated in sorted order and mapped back. Square points with tied centers
    are skipped (the update is ill-defined there); prisms only contain sorted
    points, ties included. The witness is the lexicographically smallest
    escaping start.
    """
    if m.K != 2:
        raise DomainError("the containment oracle needs a two-component mixture")
    if grid_per_axis < 2:
        raise DomainError("grid_per_axis must be >= 2")
    box = region.box(m.means[0], m.means[1], m.sigma)
    axes = [np.linspace(lo, hi, grid_per_axis) for lo, hi in box]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(box))
    if region.kind == "square_k2":
        pts = pts[pts[:, 0] != pts[:, 1]]
    else:
        pts = pts[np.all(np.diff(pts, axis=1) >= 0, axis=1)]
    order = np.argsort(pts, axis=1, kind="stable")
    srt = np.take_along_axis(pts, order, axis=1)
    imgs = np.empty_like(pts)
    np.put_along_axis(imgs, order, population_update_batch(m, srt), axis=1)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    bad = np.any((imgs < lo) | (imgs > hi), axis=1)
    if not bad.any():
        return OracleResult(True, None, len(pts))
    esc = pts[bad]
    first = np.lexsort(esc.T[::-1])[0]
    return OracleResult(False, esc[first], len(pts))


# ------------------------------------------------------------------ init parameters


@dataclass(frozen=True)
class InitParams:
    """Parameters of the pruned MinDiam initialization (lengths in units of sigma)."""

    w_min: float
    delta: float
    delta_max: float
    delta_miss: float
    tau: float
    L: int
    p0: float
    t: float

    @property
    def delta_thresh(self) -> float:
        return self.delta_miss

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("w_min", "delta", "delta_max", "delta_miss", "tau", "L", "p0", "t")}


def sample_size_bound(w_min: float, delta: float, delta_miss: float) -> float:
    """Real-valued lower bound on the number of preliminary centers L."""
    t = 2.0 * normal_cdf(-delta / 2.0)
    return math.log(1.0 / (delta_miss * w_min)) / ((1.0 - t) * w_min)


def compute_init_params(
    w_min: float,
    delta: float,
    delta_miss: float,
    tau: float = 0.015,
    delta_max: float | None = None,
) -> InitParams:
    """L is the smallest integer meeting the bound; p0 = 1 / (e L)."""
    if not 0 < w_min < 1:
        raise DomainError(f"w_min must lie in (0, 1), got {w_min}")
    if not 0 < delta_miss < 1:
        raise DomainError(f"delta_miss must lie in (0, 1), got {delta_miss}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not 0 < tau < 0.5:
        raise DomainError(f"tau must lie in (0, 0.5), got {tau}")
    delta_max = delta if delta_max is None else float(delta_max)
    if delta_max < delta:
        raise DomainError("delta_max must be >= delta")
    t = 2.0 * normal_cdf(-delta / 2.0)
    bound = sample_size_bound(w_min, delta, delta_miss)
    # guard against the ceiling of a value that is an integer up to roundoff
    L = max(1, math.ceil(bound - 1e-12))
    return InitParams(w_min, float(delta), delta_max, delta_miss, tau, L, 1.0 / (math.e * L), t)


@dataclass(frozen=True)
class ImpurityBound:
    w1: float
    w2: float
    delta_z0: float
    p1: float
    delta_impure: float
    outside_mass: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def impurity_bound(w1: float, w2: float, delta: float, tau: float, p0: float, L: int) -> ImpurityBound:
    """Probability bound for a large impure cluster between two neighbouring components.

    ``outside_mass`` is the two-term Phi expression; it bounds the mass left
    outside an interval of length twice the minimal impure-cluster length, so
    ``p1 = 1 - outside_mass`` and ``delta_impure = (1 - p1) ** (L - 1)``.
    """
    for w in (w1, w2):
        if not 0 < tau * p0 / w < 1:
            raise DomainError("tau * p0 / w must lie in (0, 1)")
    dz0 = delta - tail_cutoff_d(tau * p0 / w1) - tail_cutoff_d(tau * p0 / w2)
    if dz0 <= 0:
        raise AssumptionViolation(f"minimal impure-cluster length is {dz0:.4g} <= 0")
    gap = delta - 2.0 * dz0
    if gap > 0:
        lr = math.log(w1 / w2)
        outside = w1 * normal_cdf(gap / 2 - lr / gap) + w2 * normal_cdf(gap / 2 + lr / gap)
    else:
        # limit gap -> 0+: the lighter component contributes its whole weight
        outside = min(w1, w2)
    p1 = 1.0 - outside
    return ImpurityBound(w1, w2, dz0, p1, outside ** (L - 1), outside)


def worst_case_impurity(
    w_min: float, delta: float, tau: float, p0: float, L: int, K: int = 2, step: float = 0.005
) -> ImpurityBound:
    """Smallest p1 over w1, w2 >= w_min with w1 + w2 <= 1 - (K - 2) w_min, by grid search."""
    cap = 1.0 - (K - 2) * w_min
    grid = np.arange(w_min, cap - w_min + 1e-12, step)
    worst = None
    for w1 in grid:
        for w2 in grid:
            if w1 + w2 > cap + 1e-12:
                break
            ib = impurity_bound(float(w1), float(w2), delta, tau, p0, L)
            if worst is None or ib.p1 < worst.p1:
                worst = ib
    if worst is None:
        raise DomainError("no feasible weight pair on the grid")
    return worst


def purity_radius(w: float, tau: float, p0: float) -> float:
    """R(w): distance bound between a pure large cluster's component mean and mu_k."""
    return tail_center_of_mass_r(tail_cutoff_d((1.0 - tau) * p0 / w))


def purity_radius_tilde(w1: float, w2: float, tau: float, p0: float, delta: float) -> float:
    """R~(w1, w2); returns -inf when the Phi^-1 argument reaches 1 (no usable bound)."""
    arg = tau * w1 / ((1.0 - tau) * w2) + normal_cdf(tail_cutoff_d((1.0 - tau) * p0 / w1) - delta)
    if arg >= 1.0:
        return -math.inf
    return -normal_quantile(arg)


@dataclass(frozen=True)
class PurityRadii:
    w_max: float
    R_wmax: float
    R_wmin: float
    R_tilde: float
    half_width: float
    a_tilde: tuple[Interval, ...]
    a_tilde_weighted: tuple[Interval, ...] = field(default=())

    @property
    def disjoint(self) -> bool:
        return all(x.disjoint(y) for x, y in zip(self.a_tilde, self.a_tilde[1:]))

    def to_dict(self) -> dict:
        return {
            "w_max": self.w_max,
            "R_wmax": self.R_wmax,
            "R_wmin": self.R_wmin,
            "R_tilde": self.R_tilde,
            "R_tilde_negative": self.R_tilde < 0,
            "half_width": self.half_width,
            "a_tilde": [[iv.lo, iv.hi] for iv in self.a_tilde],
            "a_tilde_weighted": [[iv.lo, iv.hi] for iv in self.a_tilde_weighted],
            "disjoint": self.disjoint,
        }


def purity_radii(m: GaussianMixture1D, params: InitParams) -> PurityRadii:
    """Neighbourhoods of the means that contain every surviving center w.h.p.

    ``a_tilde`` uses the weight-free worst case; ``a_tilde_weighted`` uses the
    mixture's actual weights and gaps. Radii are scaled by ``m.sigma``.
    """
    tau, p0 = params.tau, params.p0
    w_max = 1.0 - (m.K - 1) * params.w_min
    R_max = purity_radius(w_max, tau, p0)
    R_min = purity_radius(params.w_min, tau, p0)
    R_t = purity_radius_tilde(w_max, params.w_min, tau, p0, params.delta)
    s = m.sigma
    hw = ((1.0 - tau) * R_max + tau * params.delta_max) * s
    a_tilde = tuple(Interval(mu - hw, mu + hw) for mu in m.means)

    weighted = []
    mu = np.asarray(m.means) / s
    for k, w in enumerate(m.weights):
        R = purity_radius(w, tau, p0)
        left = R if k == 0 else (1 - tau) * R + tau * (mu[k] - mu[k - 1])
        right = R if k == m.K - 1 else (1 - tau) * R + tau * (mu[k + 1] - mu[k])
        weighted.append(Interval(m.means[k] - left * s, m.means[k] + right * s))
    return PurityRadii(w_max, R_max, R_min, R_t, hw, a_tilde, tuple(weighted))


class AssumptionCheck(NamedTuple):
    id: int
    holds: bool
    slack: float


def _local_purity_sum(m: GaussianMixture1D, offset: float) -> float:
    """Largest sum over k' != k of w_k' phi_k' / (w_k phi_k) at mu_k +/- offset (sigma units)."""
    mu = np.asarray(m.means) / m.sigma
    w = np.asarray(m.weights)
    worst = 0.0
    for k in range(m.K):
        for side in (-1.0, 1.0):
            x = mu[k] + side * offset
            logs = np.log(w) - 0.5 * (x - mu) ** 2 - (math.log(w[k]) - 0.5 * (x - mu[k]) ** 2)
            total = float(np.exp(np.delete(logs, k)).sum()) if m.K > 1 else 0.0
            worst = max(worst, total)
    return worst


def check_assumptions(m: GaussianMixture1D, params: InitParams) -> list[AssumptionCheck]:
    """Slack of each of the five assumptions of the initialization theorem (>= 0 holds)."""
    tau, p0, wmin = params.tau, params.p0, params.w_min
    D, Dmax = params.delta, params.delta_max
    out = [AssumptionCheck(1, min(m.weights) >= wmin, min(m.weights) - wmin)]

    try:
        offset = normal_quantile(0.5 + (1 - tau) * p0 / (2 * wmin))
        s2 = tau / (1 - tau) - _local_purity_sum(m, offset)
    except DomainError:
        s2 = -math.inf
    out.append(AssumptionCheck(2, s2 >= 0, s2))

    s3 = D / 2 - tail_cutoff_d(tau * p0 / wmin)
    out.append(AssumptionCheck(3, s3 > 0, s3))

    s4 = 0.5 - normal_cdf(-D / 2) - tau / wmin
    out.append(AssumptionCheck(4, s4 >= 0, s4))

    try:
        w_max = 1.0 - (m.K - 1) * wmin
        rhs = (3 * purity_radius(w_max, tau, p0) + purity_radius(wmin, tau, p0)) * (1 - tau)
        s5 = (1 - 3 * tau) * D - tau * Dmax - rhs
    except (DomainError, OverflowError):
        s5 = -math.inf
    out.append(AssumptionCheck(5, s5 > 0, s5))
    return out


__all__ = [
    "RegionSpec",
    "Certificate",
    "certify_square_k2",
    "certify_prism_k3",
    "certify",
    "containment_oracle",
    "OracleResult",
    "InitParams",
    "compute_init_params",
    "sample_size_bound",
    "ImpurityBound",
    "impurity_bound",
    "worst_case_impurity",
    "purity_radius",
    "purity_radius_tilde",
    "PurityRadii",
    "purity_radii",
    "AssumptionCheck",
    "check_assumptions",
]
