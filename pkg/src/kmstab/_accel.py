"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
``KMSTAB_DISABLE_NUMBA`` is unset or ``0``. Both paths are always importable
as ``*_numpy`` / ``*_numba`` so they can be compared against each other.
"""

import math
import os

import numpy as np
from scipy.special import erfc as _erfc_vec

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _flag_disabled() -> bool:
    return os.environ.get("KMSTAB_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _flag_disabled()


# ---------------------------------------------------------------- numpy path


def assign_numpy(X, C):
    """Nearest-center labels and squared distances; ties go to the lowest index."""
    diff = X[:, None, :] - C[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diff, diff)
    labels = np.argmin(d2, axis=1)
    return labels.astype(np.int64), d2[np.arange(X.shape[0]), labels]


def update_numpy(X, labels, C):
    """Cluster means for the given labels; empty clusters keep their center."""
    k, d = C.shape
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.zeros((k, d))
    np.add.at(sums, labels, X)
    out = C.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out, counts


def confusion_numpy(a, b, k):
    return np.bincount(a * k + b, minlength=k * k).reshape(k, k).astype(np.int64)


def _std_mass_numpy(lo, hi):
    # Φ(hi) - Φ(lo) without cancellation in either tail.
    right = lo > 0
    left = hi < 0
    mid = ~(right | left)
    out = np.empty(np.broadcast(lo, hi).shape)
    lo_b, hi_b = np.broadcast_arrays(lo, hi)
    out[right] = 0.5 * (_erfc_vec(lo_b[right] / _SQRT2) - _erfc_vec(hi_b[right] / _SQRT2))
    out[left] = 0.5 * (_erfc_vec(-hi_b[left] / _SQRT2) - _erfc_vec(-lo_b[left] / _SQRT2))
    out[mid] = 1.0 - 0.5 * _erfc_vec(hi_b[mid] / _SQRT2) - 0.5 * _erfc_vec(-lo_b[mid] / _SQRT2)
    return out


def population_update_numpy(weights, means, sigma, centers):
    """Population Lloyd update for a batch of sorted 1-D center vectors.

    ``centers`` has shape (M, K'); cells are delimited by midpoints. Returns
    the (M, K') images, NaN where a cell has zero mass.
    """
    M, kp = centers.shape
    mids = 0.5 * (centers[:, 1:] + centers[:, :-1])
    lo = np.concatenate([np.full((M, 1), -np.inf), mids], axis=1)
    hi = np.concatenate([mids, np.full((M, 1), np.inf)], axis=1)
    za = (lo[:, :, None] - means[None, None, :]) / sigma
    zb = (hi[:, :, None] - means[None, None, :]) / sigma
    mass = _std_mass_numpy(za, zb)
    pa = np.where(np.isfinite(za), np.exp(-0.5 * np.where(np.isfinite(za), za, 0.0) ** 2), 0.0)
    pb = np.where(np.isfinite(zb), np.exp(-0.5 * np.where(np.isfinite(zb), zb, 0.0) ** 2), 0.0)
    first = means[None, None, :] * mass + sigma * _INV_SQRT_2PI * (pa - pb)
    tot = (weights * mass).sum(axis=2)
    num = (weights * first).sum(axis=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(tot > 0, num / tot, np.nan)
    return np.clip(out, lo, hi)


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def assign_numba(X, C):
    n, d = X.shape
    k = C.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    for i in range(n):
        bl = 0
        bd = np.inf
        for j in range(k):
            s = 0.0
            for t in range(d):
                u = X[i, t] - C[j, t]
                s += u * u
            if s < bd:
                bd = s
                bl = j
        labels[i] = bl
        best[i] = bd
    return labels, best


@njit(cache=True)
def update_numba(X, labels, C):
    n, d = X.shape
    k = C.shape[0]
    counts = np.zeros(k, dtype=np.int64)
    sums = np.zeros((k, d))
    for i in range(n):
        j = labels[i]
        counts[j] += 1
        for t in range(d):
            sums[j, t] += X[i, t]
    out = C.copy()
    for j in range(k):
        if counts[j] > 0:
            for t in range(d):
                out[j, t] = sums[j, t] / counts[j]
    return out, counts


@njit(cache=True)
def confusion_numba(a, b, k):
    m = np.zeros((k, k), dtype=np.int64)
    for i in range(a.shape[0]):
        m[a[i], b[i]] += 1
    return m


@njit(cache=True)
def _std_mass_scalar(lo, hi):
    if lo > 0.0:
        return 0.5 * (math.erfc(lo / _SQRT2) - math.erfc(hi / _SQRT2))
    if hi < 0.0:
        return 0.5 * (math.erfc(-hi / _SQRT2) - math.erfc(-lo / _SQRT2))
    return 1.0 - 0.5 * math.erfc(hi / _SQRT2) - 0.5 * math.erfc(-lo / _SQRT2)


@njit(cache=True)
def _std_pdf_scalar(z):
    if math.isinf(z):
        return 0.0
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


@njit(cache=True)
def population_update_numba(weights, means, sigma, centers):
    M, kp = centers.shape
    K = means.shape[0]
    out = np.empty((M, kp))
    for m in range(M):
        for j in range(kp):
            lo = -np.inf if j == 0 else 0.5 * (centers[m, j - 1] + centers[m, j])
            hi = np.inf if j == kp - 1 else 0.5 * (centers[m, j] + centers[m, j + 1])
            tot = 0.0
            num = 0.0
            for c in range(K):
                za = (lo - means[c]) / sigma
                zb = (hi - means[c]) / sigma
                ms = _std_mass_scalar(za, zb)
                tot += weights[c] * ms
                num += weights[c] * (means[c] * ms + sigma * (_std_pdf_scalar(za) - _std_pdf_scalar(zb)))
            if tot > 0.0:
                v = num / tot
                if v < lo:
                    v = lo
                elif v > hi:
                    v = hi
                out[m, j] = v
            else:
                out[m, j] = np.nan
    return out


# ---------------------------------------------------------------- dispatch

if USE_NUMBA:
    assign = assign_numba
    update = update_numba
    confusion = confusion_numba
    population_update_batch = population_update_numba
else:
    assign = assign_numpy
    update = update_numpy
    confusion = confusion_numpy
    population_update_batch = population_update_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
