"""Evaluable probability bounds: Dirichlet tails, Hoeffding, and the large-deviation envelope."""

from dataclasses import dataclass
from math import exp, log, sqrt

import numpy as np

from .errors import DomainError, PreconditionViolated

_INV_E = exp(-1.0)


def dirichlet_tail_bound(p, t):
    """Bound on P(|X_i - E X_i| >= t_i for every i) for X ~ Dirichlet(alpha, beta).

    Sub-Gaussian bound 2^d exp(-|t|^2 / (2 sigma^2)) with the proxy variance
    replaced by its cap sigma^2 = 1 / (4 (|alpha|_1 + beta + 1)).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (p.d,) or np.any(t <= 0):
        raise DomainError("t must be a positive vector of length d")
    return float(2.0**p.d * np.exp(-np.sum(t * t) * 2.0 * (p.total + 1.0)))


def hoeffding_bound(n, range_width, t):
    """exp(-2 t^2 / (n w^2)), the one-sided tail of a sum of n variables with range w."""
    if n < 1 or not range_width > 0 or t < 0:
        raise DomainError("need n >= 1, range_width > 0 and t >= 0")
    return exp(-2.0 * t * t / (n * range_width**2))


def solve_delta(x, tol=1e-12):
    """The unique delta in (0, 1/e] with delta |ln delta| = x, by bisection."""
    if not 0 < x <= _INV_E:
        raise DomainError(f"x must lie in (0, 1/e], got {x!r}")
    if x == _INV_E:
        # the map is flat at 1/e, where bisection could stop a few ulps short in x
        return _INV_E
    lo, hi = 0.0, _INV_E
    while hi - lo > tol * max(lo, 1e-300) and hi - lo > 5e-324:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if -mid * log(mid) < x:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class DeviationConfig:
    n: int
    b: float
    a: float
    d: int
    f_sup: float
    C: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise DomainError("n and d must be positive")
        if not 0 < self.b < 1:
            raise DomainError("b must lie in (0, 1)")
        if not (self.a > 0 and self.f_sup > 0 and self.C > 0):
            raise DomainError("a, f_sup and C must be positive")

    @property
    def a_cap(self):
        return _INV_E * self.f_sup * abs(log(self.b)) / self.b ** (self.d + 0.5)


@dataclass(frozen=True)
class DeviationBound:
    value: float
    delta: float
    exponent: float
    hypotheses_hold: bool
    failed: tuple = ()


def large_deviation_bound(cfg):
    """C exp(-(sqrt(n) b^{d+1/2} a / (|ln delta| |ln b|))^2 / (100^2 d^4 f_sup^2)).

    delta solves delta |ln delta| = b^{d+1/2} a / (f_sup |ln b|). The asymptotic
    hypotheses on (n, b) are reported in ``failed`` rather than enforced.
    """
    n, b, a, d, fs = cfg.n, cfg.b, cfg.a, cfg.d, cfg.f_sup
    if a > cfg.a_cap * (1 + 1e-12):
        raise PreconditionViolated(f"a = {a!r} exceeds its cap {cfg.a_cap!r}")
    lb = abs(log(b))
    delta = solve_delta(min(b ** (d + 0.5) * a / (fs * lb), _INV_E))
    arg = sqrt(n) * b ** (d + 0.5) * a / (abs(log(delta)) * lb)
    exponent = -(arg * arg) / (100.0**2 * d**4 * fs * fs)
    failed = []
    if not b <= min(exp(-16 * sqrt(2)), 1.0 / d):
        failed.append("b <= exp(-16 sqrt 2) and b <= 1/d")
    if not n >= 100.0**6 * d**6:
        failed.append("n >= 100^6 d^6")
    if not b >= n ** (-1.0 / d):
        failed.append("b >= n^(-1/d)")
    return DeviationBound(cfg.C * exp(exponent), delta, exponent, not failed, tuple(failed))
