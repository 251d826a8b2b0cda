"""Closed-form asymptotics of the Dirichlet kernel estimator.

Notation: ``psi(s) = [(4 pi)^d (1 - |s|_1) prod s_i]^{-1/2}`` is the interior
variance constant and ``g`` the first-order bias coefficient, so that

    bias ~ b g(s),    variance ~ n^{-1} b^{-d/2} psi(s) f(s).

Integrals over S (MISE, MAE) use midpoint grids whose nodes never touch the
boundary, where psi has an integrable singularity.
"""

from dataclasses import dataclass
from math import factorial, log, pi, sqrt

import numpy as np
from scipy.optimize import minimize_scalar

from .dirichlet import kernel_params_at, log_density
from .errors import BoundaryDivergence, DegenerateG, RegimeMismatch
from .simplex import as_points, make_grid, sample_uniform
from .specfun import log_gamma

BOUNDARY_THRESHOLD = 5.0


def _parts(s):
    pts = as_points(s)
    return np.column_stack([pts, 1.0 - pts.sum(axis=1)])


def _squeeze(out, s):
    return float(out[0]) if np.ndim(s) == 1 else out


def psi(s):
    """Interior variance constant; diverges on the boundary of S."""
    return psi_J(s, ())


def psi_J(s, J):
    """Variance constant when the parts indexed by ``J`` sit at distance O(b) from zero.

    ``J`` holds 0-based coordinate indices; index ``d`` refers to the last part
    1 - |s|_1 (an exchangeability extension; the last part must otherwise be
    positive).
    """
    u = _parts(s)
    d = u.shape[1] - 1
    keep = [k for k in range(d + 1) if k not in set(J)]
    sub = u[:, keep]
    if np.any(sub <= 0):
        raise BoundaryDivergence("psi_J needs positive parts outside J")
    out = ((4.0 * pi) ** (d - len(J)) * np.prod(sub, axis=1)) ** -0.5
    return _squeeze(out, s)


def boundary_factor(kappa):
    """Gamma(2k + 1) / (2^{2k+1} Gamma(k + 1)^2), the variance factor of a part at distance k*b."""
    kappa = np.asarray(kappa, dtype=float)
    out = np.exp(log_gamma(2 * kappa + 1) - (2 * kappa + 1) * log(2.0) - 2 * log_gamma(kappa + 1))
    return float(out) if out.ndim == 0 else out


def g_at(target, s):
    """First-order bias coefficient g(s) from the analytic gradient and Hessian of the target."""
    pts = as_points(s)
    d = pts.shape[1]
    grad = np.atleast_2d(target.gradient(pts))
    hess = target.hessian(pts).reshape(len(pts), d, d)
    first = np.sum((1.0 - (d + 1) * pts) * grad, axis=1)
    cov = pts[:, :, None] * (np.eye(d)[None] - pts[:, None, :])
    second = 0.5 * np.einsum("nij,nij->n", cov, hess)
    return _squeeze(first + second, s)


def bias_approx(target, s, b):
    return b * g_at(target, s)


@dataclass(frozen=True)
class Regime:
    J: tuple = ()
    kappa: tuple = ()

    @property
    def interior(self):
        return not self.J

    def __str__(self):
        if self.interior:
            return "interior"
        return "boundary(J=%s, kappa=%s)" % (list(self.J), [round(k, 6) for k in self.kappa])


def classify_regime(s, b, threshold=BOUNDARY_THRESHOLD):
    """Parts with u_k / b <= threshold are treated as boundary parts (kappa_k = u_k / b)."""
    u = _parts(np.asarray(s, dtype=float))[0]
    J = tuple(int(k) for k in np.flatnonzero(u / b <= threshold))
    return Regime(J, tuple(float(u[k] / b) for k in J))


def variance_approx(target, s, n, b, regime=None):
    """Leading-order variance of fhat(s); ``regime=None`` means interior."""
    s = np.asarray(s, dtype=float)
    d = s.shape[-1]
    f = target.pdf(s)
    if regime is None or (regime.interior and not regime.kappa):
        return n ** -1.0 * b ** (-d / 2) * psi(s) * f
    if not regime.J or len(regime.J) != len(regime.kappa):
        raise RegimeMismatch("boundary regime needs a nonempty J with one kappa per index")
    if any(k < 0 for k in regime.kappa):
        raise RegimeMismatch("kappa must be nonnegative")
    factor = float(np.prod(boundary_factor(np.asarray(regime.kappa))))
    return n ** -1.0 * b ** (-(d + len(regime.J)) / 2) * psi_J(s, regime.J) * f * factor


@dataclass(frozen=True)
class AsymptoticReport:
    psi: float
    g: float
    bias: float
    variance: float
    mse: float
    regime: Regime


def mse_approx(target, s, n, b, threshold=BOUNDARY_THRESHOLD, regime_aware=False):
    """Leading-order MSE at an interior point.

    The interior variance is used unless ``regime_aware`` is set, in which case
    points classified as boundary points get the boundary variance. The
    classification is reported either way.
    """
    s = np.asarray(s, dtype=float)
    regime = classify_regime(s, b, threshold)
    g = g_at(target, s)
    use = regime if regime_aware and not regime.interior else None
    var = variance_approx(target, s, n, b, use)
    bias = b * g
    return AsymptoticReport(psi=psi(s), g=g, bias=bias, variance=var, mse=var + bias * bias, regime=regime)


def b_opt_mse(target, s, n):
    s = np.asarray(s, dtype=float)
    d = s.shape[-1]
    g = g_at(target, s)
    f = target.pdf(s)
    if f * g == 0:
        raise DegenerateG("f(s) g(s) = 0: no MSE-optimal bandwidth")
    return n ** (-2.0 / (d + 4)) * ((d / 4.0) * psi(s) * f / g**2) ** (2.0 / (d + 4))


@dataclass(frozen=True)
class Functionals:
    """Integrals over S of psi f, g^2, sqrt(psi f) and |g|."""

    int_psi_f: float
    int_g2: float
    int_sqrt_psi_f: float
    int_abs_g: float
    d: int


def functionals(target, grid=None, mc_samples=None, rng=None):
    """Compute the four functionals by grid quadrature, or by Monte Carlo when ``mc_samples`` is given."""
    d = target.d

    def fn(pts):
        pf = psi(pts) * target.pdf(pts)
        g = g_at(target, pts)
        return np.column_stack([pf, g * g, np.sqrt(pf), np.abs(g)])

    if mc_samples is not None:
        pts = sample_uniform(d, int(mc_samples), np.random.default_rng(rng))
        vals = fn(pts).mean(axis=0) / factorial(d)
    else:
        grid = grid or make_grid(d, 400 if d == 1 else 120)
        vals = grid.weights @ fn(grid.nodes)
    return Functionals(*map(float, vals), d=d)


def _as_functionals(target, grid):
    return target if isinstance(target, Functionals) else functionals(target, grid)


def mise_approx(target, n, b, grid=None):
    fs = _as_functionals(target, grid)
    return n ** -1.0 * b ** (-fs.d / 2) * fs.int_psi_f + b**2 * fs.int_g2


def b_opt_mise(target, n, grid=None):
    fs = _as_functionals(target, grid)
    d = fs.d
    if not fs.int_g2 > 0:
        raise DegenerateG("integral of g^2 vanishes: no MISE-optimal bandwidth")
    return n ** (-2.0 / (d + 4)) * ((d / 4.0) * fs.int_psi_f / fs.int_g2) ** (2.0 / (d + 4))


def mise_at_optimum(target, n, grid=None):
    """The closed-form optimal MISE value n^{-4/(d+4)} [(1 + d/4)/(d/4)^{d/(d+4)}] I1^{4/(d+4)} I2^{d/(d+4)}."""
    fs = _as_functionals(target, grid)
    d = fs.d
    const = (1 + d / 4.0) / (d / 4.0) ** (d / (d + 4.0))
    return n ** (-4.0 / (d + 4)) * const * fs.int_psi_f ** (4.0 / (d + 4)) * fs.int_g2 ** (d / (d + 4.0))


def mae_bound(target, n, b, grid=None):
    fs = _as_functionals(target, grid)
    return n**-0.5 * b ** (-fs.d / 4) * sqrt(2 / pi) * fs.int_sqrt_psi_f + b * fs.int_abs_g


def b_opt_mae(target, n, grid=None):
    fs = _as_functionals(target, grid)
    d = fs.d
    if not fs.int_abs_g > 0:
        raise DegenerateG("integral of |g| vanishes: no MAE-optimal bandwidth")
    ratio = (d / 4.0) * sqrt(2 / pi) * fs.int_sqrt_psi_f / fs.int_abs_g
    return n ** (-2.0 / (d + 4)) * ratio ** (4.0 / (d + 4))


def mae_at_optimum(target, n, grid=None):
    fs = _as_functionals(target, grid)
    d = fs.d
    const = (1 + d / 4.0) / (d / 4.0) ** (d / (d + 4.0))
    lead = sqrt(2 / pi) * fs.int_sqrt_psi_f
    return n ** (-2.0 / (d + 4)) * const * lead ** (4.0 / (d + 4)) * fs.int_abs_g ** (d / (d + 4.0))


def numeric_argmin(objective, lo=1e-8, hi=1.0):
    """Minimize a positive objective of the bandwidth by bounded Brent search in log b."""
    res = minimize_scalar(
        lambda t: objective(np.exp(t)),
        bounds=(np.log(lo), np.log(hi)),
        method="bounded",
        options={"xatol": 1e-12, "maxiter": 500},
    )
    return float(np.exp(res.x))


def _interior_parts(s):
    u = _parts(np.asarray(s, dtype=float))[0]
    if np.any(u <= 0):
        raise BoundaryDivergence("A_b is evaluated on Int(S) only")
    return u


def A_b(s, b):
    """Squared L2 norm of the kernel at s: integral over S of K_{s/b+1,(1-|s|_1)/b+1}^2."""
    u = _interior_parts(s)
    d = len(u) - 1
    log_a = (
        np.sum(log_gamma(2 * u / b + 1) - 2 * log_gamma(u / b + 1))
        + 2 * log_gamma(1 / b + d + 1)
        - log_gamma(2 / b + d + 1)
    )
    return float(np.exp(log_a))


def A_tilde_b(s, b):
    """Normalizer ratio governing E[K^3] / E[K^2] of the kernel at s."""
    u = _interior_parts(s)
    d = len(u) - 1
    log_a = (
        np.sum(log_gamma(3 * u / b + 1) - log_gamma(2 * u / b + 1) - log_gamma(u / b + 1))
        + log_gamma(2 / b + d + 1)
        + log_gamma(1 / b + d + 1)
        - log_gamma(3 / b + d + 1)
    )
    return float(np.exp(log_a))


def exact_variance(target, s, n, b, m=None):
    """Finite-b variance n^{-1} (E[K(X)^2] - f_b(s)^2) of fhat(s), by grid quadrature."""
    from .estimator import default_oracle_resolution, smoothed_mean

    s = np.asarray(s, dtype=float)
    grid = make_grid(target.d, m or default_oracle_resolution(target.d))
    k2 = np.exp(2 * log_density(kernel_params_at(s, b, 1), grid.nodes))
    second = float(grid.weights @ (target.pdf(grid.nodes) * k2))
    fb = smoothed_mean(target, b, s, m=m)
    return (second - fb * fb) / n
