"""The Dirichlet kernel density estimator.

    fhat(s) = (1/n) sum_i K_{s/b + 1, (1 - |s|_1)/b + 1}(X_i)

For a block of evaluation points the log-kernel matrix is an affine function of
the data log-parts, ``C(s) + A(s) @ log(parts(X)).T``, so it is computed with
a single matrix product.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dirichlet import kernel_params_at, log_density, sample as dirichlet_sample
from .errors import DatasetTooSmall, DomainError
from .simplex import as_points, make_grid, validate_points
from .specfun import log_gamma

# stands in for log(0) so that 0 * log(0) stays 0 inside the matrix product
_LOG_FLOOR = -1e300
_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True, eq=False)
class Dataset:
    points: np.ndarray

    def __post_init__(self):
        pts = validate_points(np.atleast_2d(np.asarray(self.points, dtype=float)))
        if len(pts) < 1:
            raise DatasetTooSmall("a dataset needs at least one observation")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n

    @cached_property
    def log_parts(self):
        """log of the d + 1 parts of every observation, -inf replaced by a finite floor."""
        parts = np.column_stack([self.points, np.clip(1.0 - self.points.sum(axis=1), 0.0, None)])
        with np.errstate(divide="ignore"):
            lp = np.log(parts)
        lp[np.isneginf(lp)] = _LOG_FLOOR
        lp.setflags(write=False)
        return lp


def check_bandwidth(b):
    b = float(b)
    if not 0 < b <= 1:
        raise DomainError(f"bandwidth must lie in (0, 1], got {b!r}")
    return b


def _as_dataset(data):
    return data if isinstance(data, Dataset) else Dataset(data)


def kernel_log_matrix(points, b, data):
    """log K_{s/b+1,(1-|s|_1)/b+1}(X_j) for every evaluation point s (rows) and observation j (columns)."""
    s = as_points(points)
    d = s.shape[1]
    rest = np.clip(1.0 - s.sum(axis=1), 0.0, None)
    coef = np.column_stack([s, rest]) / b
    const = log_gamma(1.0 / b + d + 1.0) - np.sum(log_gamma(coef + 1.0), axis=1)
    return const[:, None] + coef @ data.log_parts.T


def _rows_per_chunk(n):
    return max(1, _CHUNK_ELEMS // max(n, 1))


def estimate(data, b, points):
    """fhat at every row of ``points``; returns an array of shape ``(N,)``."""
    data = _as_dataset(data)
    b = check_bandwidth(b)
    pts = validate_points(as_points(points))
    if pts.shape[1] != data.d:
        raise DomainError("evaluation points and data differ in dimension")
    out = np.empty(len(pts))
    step = _rows_per_chunk(data.n)
    for lo in range(0, len(pts), step):
        out[lo:lo + step] = np.exp(kernel_log_matrix(pts[lo:lo + step], b, data)).mean(axis=1)
    return out


def estimate_at(data, b, s):
    """fhat(s) at a single point."""
    return float(estimate(data, b, np.atleast_1d(np.asarray(s, dtype=float)))[0])


def estimate_on_grid(data, b, grid):
    return estimate(data, b, grid.nodes)


def loo_estimate_at(data, b, i, s):
    """Estimator at ``s`` built from every observation except the ``i``-th."""
    data = _as_dataset(data)
    if data.n < 2:
        raise DatasetTooSmall("leave-one-out needs n >= 2")
    b = check_bandwidth(b)
    k = np.exp(kernel_log_matrix(np.atleast_1d(np.asarray(s, dtype=float)), b, data))[0]
    return float((k.sum() - k[i]) / (data.n - 1))


def loo_at_observations(data, b):
    """Vector of fhat^{(-i)}(X_i), i = 1..n."""
    data = _as_dataset(data)
    if data.n < 2:
        raise DatasetTooSmall("leave-one-out needs n >= 2")
    out = np.empty(data.n)
    step = _rows_per_chunk(data.n)
    for lo in range(0, data.n, step):
        k = np.exp(kernel_log_matrix(data.points[lo:lo + step], b, data))
        rows = np.arange(lo, min(lo + step, data.n))
        k[rows - lo, rows] = 0.0
        out[rows] = k.sum(axis=1) / (data.n - 1)
    return out


def default_oracle_resolution(d):
    return {1: 400, 2: 120}.get(d, 40)


def smoothed_mean(target, b, s, method="integral", m=None, mc_samples=100_000, rng=None, return_stderr=False):
    """f_b(s) = E fhat(s), the kernel-smoothed target.

    ``method="integral"`` integrates f(x) K_s(x) over a midpoint grid of
    resolution ``m``; ``method="mc"`` averages f(xi) over draws xi of the
    kernel law at ``s``.
    """
    s = np.asarray(s, dtype=float)
    params = kernel_params_at(s, b, 1)
    if method == "integral":
        grid = make_grid(target.d, m or default_oracle_resolution(target.d))
        vals = target.pdf(grid.nodes) * np.exp(log_density(params, grid.nodes))
        est = float(np.dot(grid.weights, vals))
        return (est, 0.0) if return_stderr else est
    if method == "mc":
        xi = dirichlet_sample(params, np.random.default_rng(rng), int(mc_samples))
        vals = target.pdf(xi)
        est = float(vals.mean())
        if return_stderr:
            return est, float(vals.std(ddof=1) / np.sqrt(len(vals)))
        return est
    raise ValueError(f"unknown method {method!r}")


def normalization_defect(data, b, grid):
    """Grid quadrature of fhat over S, minus 1."""
    return float(np.dot(grid.weights, estimate_on_grid(data, b, grid)) - 1.0)

