"""Log-gamma, digamma and the Stirling ratio, vectorized over numpy arrays.

Both log_gamma and digamma shift small arguments up to ``z >= 10`` with the
recurrence relations and then sum the asymptotic (Stirling / Bernoulli) series.
At that cut-off the first omitted series term is below 1e-17, so the error is
set by the recurrence sums alone.
"""

import math

import numpy as np

from .errors import DomainError

_SHIFT = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k - 1)), k = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# B_{2k} / (2k), k = 1..7
_DIGAMMA = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _as_positive(z, name):
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} requires finite z > 0")
    return arr


def _ret(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _horner(coefs, x):
    out = np.zeros_like(x)
    for c in reversed(coefs):
        out = out * x + c
    return out


def _stirling_correction(w):
    """log Gamma(w) - [(w - 1/2) log w - w + log(2 pi)/2], for w >= 10."""
    inv = 1.0 / w
    return inv * _horner(_STIRLING, inv * inv)


def _shift_up(z):
    """Return (w, k) with w = z + k >= _SHIFT and k a nonnegative integer array."""
    k = np.maximum(np.ceil(_SHIFT - z), 0.0)
    return z + k, k


def log_gamma(z):
    """Natural log of the gamma function for z > 0."""
    arr = _as_positive(z, "log_gamma")
    w, k = _shift_up(arr)
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + _stirling_correction(w)
    for j in range(int(k.max(initial=0.0))):
        out = out - np.where(j < k, np.log(arr + j), 0.0)
    return _ret(out, z)


def digamma(z):
    """Logarithmic derivative of the gamma function for z > 0."""
    arr = _as_positive(z, "digamma")
    w, k = _shift_up(arr)
    inv2 = 1.0 / (w * w)
    out = np.log(w) - 0.5 / w - inv2 * _horner(_DIGAMMA, inv2)
    for j in range(int(k.max(initial=0.0))):
        out = out - np.where(j < k, 1.0 / (arr + j), 0.0)
    return _ret(out, z)


def log_stirling_ratio(z):
    """log R(z), where R(z) = sqrt(2 pi) e^{-z} z^{z + 1/2} / Gamma(z + 1).

    Returns -inf at z = 0. For z >= 10 this is minus the Stirling correction,
    which avoids the cancellation of the direct formula.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("stirling_ratio requires finite z >= 0")
    out = np.full(arr.shape, -np.inf)
    big = arr >= _SHIFT
    out[big] = -_stirling_correction(arr[big])
    small = (arr > 0) & ~big
    zs = arr[small]
    out[small] = _HALF_LOG_2PI - zs + (zs + 0.5) * np.log(zs) - log_gamma(zs + 1.0)
    return _ret(out, z)


def stirling_ratio(z):
    """Ratio of Stirling's approximation of Gamma(z + 1) to its exact value."""
    return _ret(np.exp(log_stirling_ratio(z)), z)


def log_beta_multi(alpha):
    """log of the multivariate beta function sum(lgamma(a)) - lgamma(sum(a)), along the last axis."""
    a = np.asarray(alpha, dtype=float)
    return np.sum(log_gamma(a), axis=-1) - log_gamma(np.sum(a, axis=-1))
