"""Geometry of the d-simplex S = {s in [0,1]^d : |s|_1 <= 1}.

Points are handled as numpy arrays of shape ``(d,)`` or ``(N, d)``; the
:class:`SimplexPoint` wrapper exists for callers that want a validated scalar
object. Integration works with vectorized integrands ``fn(points) -> values``
taking an ``(N, d)`` array.
"""

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import (
    InvalidDelta,
    NegativeCoordinate,
    NonFiniteValue,
    ResolutionTooLarge,
    SumExceedsOne,
)

CLAMP_TOL = 1e-12
MAX_GRID_NODES = 5_000_000


@dataclass(frozen=True)
class SimplexPoint:
    coords: tuple

    @property
    def d(self):
        return len(self.coords)

    @property
    def norm1(self):
        return float(sum(self.coords))

    @property
    def remainder(self):
        """The implicit last part 1 - |s|_1."""
        return 1.0 - self.norm1

    def is_interior(self):
        return all(c > 0 for c in self.coords) and self.norm1 < 1.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)


def validate_points(coords, tol=CLAMP_TOL):
    """Validate an ``(N, d)`` (or ``(d,)``) array of points, clamping round-off.

    Coordinates in ``[-tol, 0)`` are set to 0 and rows whose sum lies in
    ``(1, 1 + tol]`` are rescaled onto the face ``|s|_1 = 1``.
    """
    arr = np.array(coords, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("point coordinates must be finite")
    if np.any(arr < -tol):
        raise NegativeCoordinate(f"negative coordinate {arr.min()!r}")
    arr[arr < 0] = 0.0
    sums = arr.sum(axis=-1)
    if np.any(sums > 1.0 + tol):
        raise SumExceedsOne(f"coordinate sum {np.max(sums)!r} exceeds 1")
    over = sums > 1.0
    if np.any(over):
        arr[over] = arr[over] / sums[over][..., None]
    return arr


def validate_point(coords):
    """Return a :class:`SimplexPoint` for a single coordinate vector."""
    arr = validate_points(np.atleast_1d(np.asarray(coords, dtype=float)))
    if arr.ndim != 1:
        raise ValueError("validate_point expects a single coordinate vector")
    return SimplexPoint(tuple(float(c) for c in arr))


def as_points(s):
    """Coerce a SimplexPoint, vector or matrix into a 2-d float array (no validation)."""
    arr = np.asarray(s, dtype=float)
    return arr.reshape(1, -1) if arr.ndim == 1 else arr


def in_inner_region(s, delta):
    """Membership in S_delta: every coordinate and 1 - |s|_1 are at least delta.

    Accepts a single point (returns bool) or an ``(N, d)`` array (returns a
    boolean array).
    """
    pts = as_points(s)
    d = pts.shape[1]
    if not 0 < delta < 1.0 / (d + 1):
        raise InvalidDelta(f"delta must lie in (0, 1/(d+1)) = (0, {1.0 / (d + 1):.6g})")
    ok = np.all(pts >= delta, axis=1) & (1.0 - pts.sum(axis=1) >= delta)
    return bool(ok[0]) if np.ndim(s) == 1 or isinstance(s, SimplexPoint) else ok


@dataclass(frozen=True)
class SimplexGrid:
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int

    @property
    def d(self):
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)


def _irwin_hall_moments(d, t):
    """Volume and first moment of sum(y) over {y in [0,1]^d : sum(y) <= t}."""
    vol = 0.0
    mom = 0.0
    for j in range(int(np.floor(t)) + 1):
        u = t - j
        c = (-1) ** j * comb(d, j)
        vol += c * u**d
        mom += c * (u ** (d + 1) / (d + 1) + j * u**d / d)
    return vol / factorial(d), mom / factorial(d - 1)


def make_grid(d, m, max_nodes=MAX_GRID_NODES):
    """Midpoint-rule grid on S from the cubic lattice of step 1/m.

    Cubes lying fully inside S contribute their centre with weight m^-d. Cubes
    cut by the face |s|_1 = 1 contribute the centroid of the part inside S,
    weighted by that part's volume (exact Irwin-Hall formulas). The weights sum
    to 1/d!; for d = 2, m = 1 this reduces to the centroid rule.
    """
    if d < 1 or m < 1:
        raise ValueError("make_grid requires d >= 1 and m >= 1")
    if comb(m - 1 + d, d) > max_nodes or m**d > 20 * max_nodes:
        raise ResolutionTooLarge(f"grid d={d}, m={m} exceeds the node cap {max_nodes}")
    idx = np.indices((m,) * d, dtype=float).reshape(d, -1).T
    level = idx.sum(axis=1)
    idx, level = idx[level <= m - 1], level[level <= m - 1]

    nodes = (idx + 0.5) / m
    weights = np.full(len(idx), float(m) ** -d)
    # cut cubes: t = m - level is the budget of sum(y) left inside the unit cube
    for t in range(1, d):
        cut = level == m - t
        if not np.any(cut):
            continue
        vol, mom = _irwin_hall_moments(d, t)
        nodes[cut] = (idx[cut] + mom / (d * vol)) / m
        weights[cut] = vol / float(m) ** d
    weights *= (1.0 / factorial(d)) / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SimplexGrid(nodes=nodes, weights=weights, resolution=m)


def sample_uniform(d, count, rng):
    """Uniform draws on S (Dirichlet(1,...,1; 1))."""
    from .dirichlet import DirichletParams, sample

    return sample(DirichletParams(np.ones(d), 1.0), rng, count)


def integrate(fn, d=None, grid=None, mc_samples=None, rng=None, return_stderr=False):
    """Approximate the integral of ``fn`` over S.

    Either pass a :class:`SimplexGrid` (midpoint quadrature), or ``d`` together
    with ``mc_samples`` and a seed / Generator ``rng`` (plain Monte Carlo with
    uniform points scaled by the volume 1/d!).
    """
    if grid is not None:
        vals = np.asarray(fn(grid.nodes), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue("integrand is not finite at every grid node")
        est = float(np.dot(grid.weights, vals))
        return (est, 0.0) if return_stderr else est
    if d is None or mc_samples is None:
        raise ValueError("integrate needs either a grid or (d, mc_samples, rng)")
    pts = sample_uniform(d, int(mc_samples), np.random.default_rng(rng))
    vals = np.asarray(fn(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("integrand is not finite at a Monte Carlo node")
    vol = 1.0 / factorial(d)
    est = vol * float(vals.mean())
    if return_stderr:
        return est, vol * float(vals.std(ddof=1)) / np.sqrt(len(vals))
    return est
