"""Known target densities: finite mixtures of Dirichlet laws.

Derivatives are analytic. A component is written as c * prod_k u_k^{a_k} over
the d + 1 parts u = (s_1, ..., s_d, 1 - |s|_1), with a = (alpha - 1, beta - 1),
and differentiated term by term; a factor with exponent 0 contributes nothing
to any derivative, which keeps boundary evaluations finite when the density is
smooth there.
"""

from dataclasses import dataclass, field

import numpy as np

from .dirichlet import DirichletParams, log_density, sample as dirichlet_sample
from .simplex import as_points, make_grid


def _safe_pow(coef, u, p):
    """coef * u**p, taken as 0 whenever coef == 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(coef == 0, 0.0, coef * np.power(u, p))
    return val


@dataclass(frozen=True)
class TargetDensity:
    weights: tuple
    components: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not comps:
            raise ValueError("need one weight per component")
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        if len({c.d for c in comps}) != 1:
            raise ValueError("components must share the dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @classmethod
    def single(cls, alpha, beta, name=""):
        return cls((1.0,), (DirichletParams(alpha, beta),), name=name)

    @classmethod
    def uniform(cls, d):
        return cls.single(np.ones(d), 1.0, name=f"uniform{d}")

    @classmethod
    def from_full(cls, weights, full_params, name=""):
        """Build from (d+1)-vectors in the usual Dirichlet(a_1, ..., a_{d+1}) notation."""
        comps = [DirichletParams(np.asarray(p[:-1], float), p[-1]) for p in full_params]
        return cls(tuple(weights), tuple(comps), name=name)

    @property
    def d(self):
        return self.components[0].d

    def pdf(self, s):
        pts = as_points(s)
        out = np.zeros(len(pts))
        for w, c in zip(self.weights, self.components):
            out += w * np.exp(log_density(c, pts))
        return float(out[0]) if np.ndim(s) == 1 else out

    def _parts(self, s):
        pts = as_points(s)
        return pts, np.column_stack([pts, 1.0 - pts.sum(axis=1)])

    def _monomial_derivs(self, c, u):
        """First and second partials of c-component w.r.t. the d+1 parts (not yet chained)."""
        a = c.full - 1.0
        norm = np.exp(c.log_normalizer())
        n, k = u.shape
        base = [_safe_pow(1.0, u[:, j], a[j]) if a[j] != 0 else np.ones(n) for j in range(k)]

        def prod_except(skip):
            out = np.full(n, norm)
            for j in range(k):
                if j not in skip:
                    out = out * base[j]
            return out

        d1 = np.zeros((n, k))
        d2 = np.zeros((n, k, k))
        for i in range(k):
            if a[i] == 0:
                continue
            d1[:, i] = _safe_pow(a[i], u[:, i], a[i] - 1.0) * prod_except({i})
            if a[i] != 1:
                d2[:, i, i] = _safe_pow(a[i] * (a[i] - 1.0), u[:, i], a[i] - 2.0) * prod_except({i})
            for j in range(i + 1, k):
                if a[j] == 0:
                    continue
                v = (
                    _safe_pow(a[i], u[:, i], a[i] - 1.0)
                    * _safe_pow(a[j], u[:, j], a[j] - 1.0)
                    * prod_except({i, j})
                )
                d2[:, i, j] = v
                d2[:, j, i] = v
        return d1, d2

    def _jacobian(self):
        d = self.d
        return np.vstack([np.eye(d), -np.ones((1, d))])

    def gradient(self, s):
        """Gradient with respect to (s_1, ..., s_d); shape ``(N, d)`` or ``(d,)``."""
        pts, u = self._parts(s)
        jac = self._jacobian()
        out = np.zeros(pts.shape)
        for w, c in zip(self.weights, self.components):
            d1, _ = self._monomial_derivs(c, u)
            out += w * d1 @ jac
        return out[0] if np.ndim(s) == 1 else out

    def hessian(self, s):
        """Hessian with respect to (s_1, ..., s_d); shape ``(N, d, d)`` or ``(d, d)``."""
        pts, u = self._parts(s)
        jac = self._jacobian()
        out = np.zeros((len(pts), self.d, self.d))
        for w, c in zip(self.weights, self.components):
            _, d2 = self._monomial_derivs(c, u)
            out += w * np.einsum("ki,nkl,lj->nij", jac, d2, jac)
        return out[0] if np.ndim(s) == 1 else out

    def sample(self, rng, count):
        rng = np.random.default_rng(rng)
        count = int(count)
        if len(self.components) == 1:
            return dirichlet_sample(self.components[0], rng, count)
        labels = rng.choice(len(self.components), size=count, p=np.asarray(self.weights))
        out = np.empty((count, self.d))
        for j, c in enumerate(self.components):
            idx = np.flatnonzero(labels == j)
            out[idx] = dirichlet_sample(c, rng, len(idx))
        return out

    def sup(self, m=None):
        """Grid estimate of sup_S f (interior midpoint nodes)."""
        m = m or (2000 if self.d == 1 else 200 if self.d == 2 else 40)
        return float(np.max(self.pdf(make_grid(self.d, m).nodes)))


BETA22 = TargetDensity.single([2.0], 2.0, name="beta22")

# 0.4 Dir(1.3, 2, 1) + 0.6 Dir(1.7, 1.2, 2.5), the first example mixture on the 2-simplex
MIXTURE_A = TargetDensity.from_full((0.4, 0.6), [(1.3, 2.0, 1.0), (1.7, 1.2, 2.5)], name="mixture1")

# 0.4 Dir(4, 1, 2) + 0.6 Dir(1, 3, 2), the second example mixture
MIXTURE_B = TargetDensity.from_full((0.4, 0.6), [(4.0, 1.0, 2.0), (1.0, 3.0, 2.0)], name="mixture2")
