"""The Dirichlet(alpha, beta) law on the simplex.

The density is

    K(x) = Gamma(|alpha|_1 + beta) / (Gamma(beta) prod Gamma(alpha_i))
           * (1 - |x|_1)^(beta - 1) * prod x_i^(alpha_i - 1),

so ``beta`` is the parameter of the implicit last part 1 - |x|_1. All
normalizers are computed in log space.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InvalidDelta,
    ParamsBelowTwo,
    PointOnBoundary,
    PointOutsideSimplex,
)
from .simplex import CLAMP_TOL, as_points
from .specfun import digamma, log_gamma


@dataclass(frozen=True)
class DirichletParams:
    alpha: np.ndarray
    beta: float

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float)).copy()
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", float(self.beta))
        if alpha.ndim != 1 or not np.all(alpha > 0) or not self.beta > 0:
            raise DomainError("Dirichlet parameters must be positive")
        if not (np.all(np.isfinite(alpha)) and np.isfinite(self.beta)):
            raise DomainError("Dirichlet parameters must be finite")

    @property
    def d(self):
        return len(self.alpha)

    @property
    def total(self):
        """|alpha|_1 + beta."""
        return float(self.alpha.sum()) + self.beta

    @property
    def full(self):
        """All d + 1 concentration parameters, beta last."""
        return np.append(self.alpha, self.beta)

    def log_normalizer(self):
        return log_gamma(self.total) - log_gamma(self.beta) - float(np.sum(log_gamma(self.alpha)))

    def __repr__(self):
        return f"DirichletParams(alpha={self.alpha.tolist()}, beta={self.beta})"


def _xlogy(x, y):
    """x * log(y) with the convention 0 * log(0) = 0 (and 0 * log(y) = 0 always)."""
    with np.errstate(divide="ignore"):
        return np.where(x == 0, 0.0, x * np.log(np.where(x == 0, 1.0, y)))


def _parts(x, d):
    pts = as_points(x)
    if pts.shape[1] != d:
        raise PointOutsideSimplex(f"expected points of dimension {d}, got {pts.shape[1]}")
    if np.any(pts < -CLAMP_TOL) or np.any(pts.sum(axis=1) > 1 + CLAMP_TOL):
        raise PointOutsideSimplex("point lies outside the simplex")
    pts = np.clip(pts, 0.0, None)
    rest = np.clip(1.0 - pts.sum(axis=1), 0.0, None)
    return pts, rest


def log_density(p, x):
    """log K_{alpha,beta}(x) for one point ``(d,)`` or many ``(N, d)``.

    A factor x_i^(alpha_i - 1) with alpha_i = 1 equals 1 even when x_i = 0;
    for alpha_i > 1 the density is 0 there (log-density -inf), and for
    alpha_i < 1 it is +inf.
    """
    pts, rest = _parts(x, p.d)
    out = p.log_normalizer() + _xlogy(p.beta - 1.0, rest) + np.sum(_xlogy(p.alpha - 1.0, pts), axis=1)
    return float(out[0]) if np.ndim(x) == 1 else out


def density(p, x):
    out = np.exp(log_density(p, x))
    return float(out) if np.ndim(out) == 0 else out


def kernel_params_at(s, b, scale=1):
    """Parameters of the kernel sitting at ``s``: alpha = scale*s/b + 1, beta = scale*(1-|s|_1)/b + 1.

    ``scale`` 1 gives the estimator's kernel; 2 and 3 give the laws whose
    normalizers appear in the second and third kernel moments.
    """
    if not b > 0:
        raise DomainError("bandwidth must be positive")
    if scale not in (1, 2, 3):
        raise DomainError("scale must be 1, 2 or 3")
    s = np.asarray(s, dtype=float)
    rest = max(1.0 - float(s.sum()), 0.0)
    return DirichletParams(scale * s / b + 1.0, scale * rest / b + 1.0)


def sample(p, rng, count):
    """``count`` i.i.d. draws as an ``(count, d)`` array.

    Uses normalized independent unit-scale Gamma variates; numpy's Gamma
    generator is the Marsaglia-Tsang rejection sampler with the shape < 1 boost.
    """
    rng = np.random.default_rng(rng)
    g = rng.gamma(p.full, size=(int(count), p.d + 1))
    return g[:, :-1] / g.sum(axis=1, keepdims=True)


def moments(p):
    """Exact mean vector and covariance matrix."""
    t = p.total
    mean = p.alpha / t
    cov = (p.alpha[:, None] * (t * np.eye(p.d) - p.alpha[None, :])) / (t**2 * (t + 1.0))
    return mean, cov


def _envelope(alpha, beta):
    d = len(alpha)
    t = float(np.sum(alpha)) + beta
    return np.sqrt((t - 1.0) / ((beta - 1.0) * np.prod(alpha - 1.0))) * (t - d - 1.0) ** d


def _require_two(*params):
    for p in params:
        if np.any(p.alpha < 2.0) or p.beta < 2.0:
            raise ParamsBelowTwo("bound requires every parameter to be >= 2")


def density_sup_bound(p):
    """Upper bound on sup_S K_{alpha,beta}, valid when all parameters are >= 2."""
    _require_two(p)
    return float(_envelope(p.alpha, p.beta))


def mode(p):
    """Mode (alpha - 1) / (|alpha|_1 + beta - d - 1), valid when all parameters exceed 1."""
    return (p.alpha - 1.0) / (p.total - p.d - 1.0)


def log_density_param_gradient(p, x):
    """Analytic derivatives of the density with respect to its parameters.

    Returns ``(d_alpha, d_beta)`` where ``d_alpha[j] = dK/dalpha_j`` and
    ``d_beta = dK/dbeta`` at the interior point ``x``, from
    dK/dalpha_j = (digamma(|alpha|_1 + beta) - digamma(alpha_j) + log x_j) K.
    """
    pts, rest = _parts(x, p.d)
    if pts.shape[0] != 1:
        raise ValueError("log_density_param_gradient expects a single point")
    xs, r = pts[0], rest[0]
    if np.any(xs <= 0) or r <= 0:
        raise PointOnBoundary("parameter derivatives need an interior point")
    k = np.exp(log_density(p, xs))
    common = digamma(p.total)
    d_alpha = (common - digamma(p.alpha) + np.log(xs)) * k
    d_beta = (common - digamma(p.beta) + np.log(r)) * k
    return d_alpha, float(d_beta)


def param_derivative_bound(p, x):
    """Envelope on |dK/dalpha_j| and |dK/dbeta| at ``x`` for parameters >= 2.

    Returns ``(bound_alpha, bound_beta)`` matching the shapes of
    :func:`log_density_param_gradient`.
    """
    _require_two(p)
    xs = np.asarray(x, dtype=float)
    r = 1.0 - xs.sum()
    if np.any(xs <= 0) or r <= 0:
        raise PointOnBoundary("parameter derivatives need an interior point")
    env = density_sup_bound(p)
    lt = abs(np.log(p.total))
    b_alpha = (lt + np.abs(np.log(p.alpha)) + np.abs(np.log(xs))) * env
    b_beta = (lt + abs(np.log(p.beta)) + abs(np.log(r))) * env
    return b_alpha, float(b_beta)


def _difference_core(p1, p2):
    _require_two(p1, p2)
    if p1.d != p2.d:
        raise ValueError("parameter sets must share the dimension")
    a_max = np.maximum(p1.alpha, p2.alpha)
    a_min = np.minimum(p1.alpha, p2.alpha)
    b_max, b_min = max(p1.beta, p2.beta), min(p1.beta, p2.beta)
    t = float(a_max.sum()) + b_max
    d = p1.d
    root = np.sqrt((t - 1.0) / ((b_min - 1.0) * np.prod(a_min - 1.0)))
    step = float(np.max(np.abs(p1.full - p2.full)))
    return 3.0 * (d + 1) * root * (t - d - 1.0) ** d * np.log(t) * step


def expectation_difference_bound(p1, p2, f_sup):
    """Bound on E|K_{p2}(X) - K_{p1}(X)| when X has a density bounded by ``f_sup``."""
    return float(f_sup * _difference_core(p1, p2))


def density_difference_bound(p1, p2, delta, f_sup):
    """Bound on max over S_delta of |K_{p2} - K_{p1}|, for 0 < delta <= 1/e.

    The factor ``f_sup`` is kept as in the published constant, although the
    pointwise statement does not depend on any sampling density.
    """
    if not 0 < delta <= np.exp(-1.0):
        raise InvalidDelta("delta must lie in (0, 1/e]")
    return float(f_sup * abs(np.log(delta)) * _difference_core(p1, p2))
