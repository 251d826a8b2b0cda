"""Data-driven bandwidth selection: plug-in, least-squares cross-validation, rule of thumb."""

from dataclasses import dataclass, field

import numpy as np

from .asymptotics import b_opt_mise
from .errors import DatasetTooSmall, DegenerateG, DegenerateSample
from .estimator import Dataset, estimate_on_grid, loo_at_observations
from .simplex import make_grid
from .target import TargetDensity

# moment estimates within this relative distance of 1 are snapped to exactly 1
_SNAP = 0.05


@dataclass(frozen=True)
class PilotFit:
    pilot: TargetDensity
    log_likelihood: float
    moment_residuals: np.ndarray = field(repr=False)
    fallback: bool = False


@dataclass(frozen=True)
class Selection:
    """A selected bandwidth; ``fallback`` marks a rule-of-thumb substitute."""

    b: float
    method: str
    fallback: bool = False
    note: str = ""

    def __float__(self):
        return self.b


def rule_of_thumb(n, d):
    """Rate-only bandwidth n^{-2/(d+4)}."""
    return float(n) ** (-2.0 / (d + 4))


def _as_dataset(data):
    return data if isinstance(data, Dataset) else Dataset(data)


def fit_pilot(data):
    """Single-Dirichlet pilot by the method of moments.

    The part means m_k fix the direction; the total concentration A0 solves
    mean_k m_k (1 - m_k) / (A0 + 1) = mean_k var_k. Parameters within 5% of 1
    are set to 1 so that a flat target yields an exactly flat pilot.
    """
    data = _as_dataset(data)
    d = data.d
    if data.n < d + 2:
        raise DatasetTooSmall(f"pilot fit needs n >= d + 2 = {d + 2}")
    parts = np.column_stack([data.points, 1.0 - data.points.sum(axis=1)])
    m = parts.mean(axis=0)
    v = parts.var(axis=0, ddof=1)
    if not np.mean(v) > 0:
        raise DegenerateSample("sample has zero variance")
    a0 = np.mean(m * (1.0 - m)) / np.mean(v) - 1.0
    fallback = not a0 > 0 or np.any(m <= 0)
    if fallback:
        pilot = TargetDensity.uniform(d)
        full = np.ones(d + 1)
    else:
        full = a0 * m
        full[np.abs(full - 1.0) <= _SNAP] = 1.0
        pilot = TargetDensity.from_full((1.0,), [full], name="pilot")
    mean = full / full.sum()
    resid = np.concatenate([m - mean, v - mean * (1 - mean) / (full.sum() + 1)])
    with np.errstate(divide="ignore"):
        ll = float(np.sum(np.log(pilot.pdf(data.points))))
    return PilotFit(pilot=pilot, log_likelihood=ll, moment_residuals=resid, fallback=fallback)


def plug_in(data, grid=None, pilot=None):
    """b_opt_mise of a pilot density, falling back to the rule of thumb."""
    data = _as_dataset(data)
    grid = grid or make_grid(data.d, 400 if data.d == 1 else 120 if data.d == 2 else 40)
    pilot = pilot or fit_pilot(data).pilot
    rot = rule_of_thumb(data.n, data.d)
    try:
        b = b_opt_mise(pilot, data.n, grid)
    except DegenerateG:
        return Selection(rot, "plugin", True, "pilot has vanishing bias coefficient")
    if not 0 < b <= 1 or not np.isfinite(b):
        return Selection(rot, "plugin", True, f"plug-in value {b!r} outside (0, 1]")
    return Selection(float(b), "plugin")


def default_candidates(n, d, count=25):
    rot = rule_of_thumb(n, d)
    cand = np.geomspace(0.2 * rot, 5.0 * rot, count)
    return np.unique(np.clip(cand, None, 1.0))


def lscv_criterion(data, b, grid):
    """LSCV(b) = int fhat^2 - (2/n) sum_i fhat^{(-i)}(X_i)."""
    data = _as_dataset(data)
    fh = estimate_on_grid(data, b, grid)
    return float(grid.weights @ (fh * fh) - 2.0 * loo_at_observations(data, b).mean())


def lscv(data, candidates=None, grid=None, return_scores=False):
    """Candidate bandwidth minimizing the LSCV criterion; ties go to the larger b."""
    data = _as_dataset(data)
    if data.n < 2:
        raise DatasetTooSmall("cross-validation needs n >= 2")
    cand = default_candidates(data.n, data.d) if candidates is None else np.asarray(candidates, float).ravel()
    if len(cand) == 0:
        raise ValueError("candidate list is empty")
    grid = grid or make_grid(data.d, 400 if data.d == 1 else 120 if data.d == 2 else 40)
    scores = np.array([lscv_criterion(data, b, grid) for b in cand])
    best = scores.min()
    tied = cand[scores == best]
    sel = Selection(float(tied.max()), "lscv")
    return (sel, cand, scores) if return_scores else sel
