"""Monte Carlo harness for the estimator's asymptotic theory.

Every replication draws from its own child stream of a ``SeedSequence`` built
from the master seed, indexed by (sample size, replication), so results do
not depend on the number of worker threads.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy import stats

from .asymptotics import (
    b_opt_mae,
    b_opt_mise,
    classify_regime,
    exact_variance,
    functionals,
    g_at,
    mae_bound,
    psi,
    variance_approx,
)
from .estimator import Dataset, default_oracle_resolution, estimate, estimate_at, estimate_on_grid, smoothed_mean
from .simplex import in_inner_region, make_grid

DEFAULT_SEED = 20251015


@dataclass(frozen=True)
class BandwidthRule:
    """``fixed`` (b = value), ``opt_mise`` / ``opt_mae`` (oracle optimum for the true
    target) or ``power`` (b = value * n^exponent)."""

    kind: str
    value: float = 1.0
    exponent: float = 0.0

    @classmethod
    def fixed(cls, b):
        return cls("fixed", float(b))

    @classmethod
    def power(cls, c, exponent):
        return cls("power", float(c), float(exponent))

    @classmethod
    def opt_mise(cls):
        return cls("opt_mise")

    @classmethod
    def opt_mae(cls):
        return cls("opt_mae")

    def resolve(self, n, fs=None):
        if self.kind == "fixed":
            return self.value
        if self.kind == "power":
            return self.value * float(n) ** self.exponent
        if self.kind == "opt_mise":
            return b_opt_mise(fs, n)
        if self.kind == "opt_mae":
            return b_opt_mae(fs, n)
        raise ValueError(f"unknown bandwidth rule {self.kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    target: object
    sample_sizes: tuple
    bandwidth: BandwidthRule
    replications: int = 100
    seed: int = DEFAULT_SEED
    grid_m: int = None
    points: tuple = ()
    workers: int = 1

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample sizes must be nonempty and strictly increasing")
        object.__setattr__(self, "sample_sizes", sizes)

    @property
    def d(self):
        return self.target.d

    @property
    def resolution(self):
        return self.grid_m or default_oracle_resolution(self.d)


@dataclass
class ReportRow:
    experiment: str
    n: int
    b: float
    metric: str
    value: float
    stderr: float = 0.0
    passed: object = None


@dataclass
class ExperimentReport:
    name: str
    rows: list = field(default_factory=list)
    slope: float = None
    half_width: float = None
    passed: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add(self, n, b, metric, value, stderr=0.0, passed=None):
        self.rows.append(ReportRow(self.name, n, b, metric, float(value), float(stderr), passed))

    def values(self, metric):
        return np.array([r.value for r in self.rows if r.metric == metric])

    def get(self, metric, n=None):
        for r in self.rows:
            if r.metric == metric and (n is None or r.n == n):
                return r.value
        raise KeyError(metric)

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["experiment", "n", "b", "metric", "value", "stderr", "pass"])
            for r in self.rows:
                flag = "" if r.passed is None else str(bool(r.passed)).lower()
                w.writerow([r.experiment, r.n, f"{r.b:.17g}", r.metric, f"{r.value:.17g}", f"{r.stderr:.17g}", flag])
        finally:
            if own:
                fh.close()


def _streams(seed, sizes, reps):
    """Child generators indexed [size][replication]."""
    root = np.random.SeedSequence(seed)
    return [[np.random.default_rng(c) for c in ss.spawn(reps)] for ss in root.spawn(len(sizes))]


def _run(fn, rngs, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return np.array(list(ex.map(fn, rngs)))
    return np.array([fn(r) for r in rngs])


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = x.std(ddof=1, axis=0) / sqrt(len(x)) if len(x) > 1 else np.zeros_like(x[0])
    return x.mean(axis=0), se


def fit_log_slope(points):
    """Least-squares slope of ln(value) on ln(n); half_width is twice its standard error."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if len(pts) == 2:
        return float((y[1] - y[0]) / (x[1] - x[0])), 0.0
    res = stats.linregress(x, y)
    return float(res.slope), float(2.0 * res.stderr)


def _functionals_if_needed(cfg, grid=None):
    if cfg.bandwidth.kind in ("opt_mise", "opt_mae"):
        return functionals(cfg.target, grid)
    return None


def run_rate_experiment(cfg):
    """Average grid ISE over replications per n, and the log-log slope of MISE in n."""
    rep = ExperimentReport("rate")
    grid = make_grid(cfg.d, cfg.resolution)
    f = cfg.target.pdf(grid.nodes)
    fs = _functionals_if_needed(cfg, grid)
    streams = _streams(cfg.seed, cfg.sample_sizes, cfg.replications)
    pts = []
    for n, rngs in zip(cfg.sample_sizes, streams):
        b = cfg.bandwidth.resolve(n, fs)

        def one(rng, n=n, b=b):
            fh = estimate_on_grid(Dataset(cfg.target.sample(rng, n)), b, grid)
            return float(grid.weights @ (fh - f) ** 2)

        mise, se = _mean_se(_run(one, rngs, cfg.workers))
        rep.add(n, b, "mise", mise, se)
        pts.append((n, mise))
    if len(pts) > 1:
        rep.slope, rep.half_width = fit_log_slope(pts)
    return rep


def run_variance_experiment(cfg, s, regime="interior", threshold=5.0):
    """Empirical Var fhat(s) over replications against the leading-order formula.

    Rows: ``empirical_variance``, ``approx_variance``, ``exact_variance`` (finite-b
    quadrature value) and ``relative_error`` = |empirical / approx - 1|.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    rep = ExperimentReport(f"variance_{regime}")
    fs = _functionals_if_needed(cfg)
    streams = _streams(cfg.seed, cfg.sample_sizes, cfg.replications)
    for n, rngs in zip(cfg.sample_sizes, streams):
        b = cfg.bandwidth.resolve(n, fs)
        vals = _run(lambda rng, n=n, b=b: estimate_at(cfg.target.sample(rng, n), b, s), rngs, cfg.workers)
        emp = float(vals.var(ddof=1))
        emp_se = emp * sqrt(2.0 / (len(vals) - 1)) if len(vals) > 1 else 0.0
        reg = None if regime == "interior" else classify_regime(s, b, threshold)
        approx = variance_approx(cfg.target, s, n, b, reg)
        rep.add(n, b, "empirical_variance", emp, emp_se)
        rep.add(n, b, "approx_variance", approx)
        rep.add(n, b, "exact_variance", exact_variance(cfg.target, s, n, b, m=max(cfg.resolution, 2000) if cfg.d == 1 else None))
        rep.add(n, b, "relative_error", abs(emp / approx - 1.0), emp_se / approx)
    return rep


def run_bias_experiment(cfg, s, bandwidths, method="integral", m=None):
    """(f_b(s) - f(s)) / b for each bandwidth, against g(s)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    rep = ExperimentReport("bias")
    g = g_at(cfg.target, s)
    f = cfg.target.pdf(s)
    for b in bandwidths:
        fb = smoothed_mean(cfg.target, b, s, method=method, m=m, rng=cfg.seed)
        ratio = (fb - f) / b
        rep.add(0, b, "ratio", ratio)
        rep.add(0, b, "abs_gap", abs(ratio - g))
    rep.add(0, 0.0, "g", g)
    return rep


def run_normality_experiment(cfg, s, center="fb"):
    """Standardized values sqrt(n) b^{d/4} (fhat(s) - c) / sqrt(psi(s) f(s)) and their KS distance to N(0, 1).

    ``center="fb"`` centers at the smoothed target f_b(s) (integral oracle);
    ``center="f"`` centers at f(s), which is valid only under undersmoothing.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    rep = ExperimentReport("normality")
    fs = _functionals_if_needed(cfg)
    streams = _streams(cfg.seed, cfg.sample_sizes, cfg.replications)
    scale = sqrt(psi(s) * cfg.target.pdf(s))
    for n, rngs in zip(cfg.sample_sizes, streams):
        b = cfg.bandwidth.resolve(n, fs)
        c = smoothed_mean(cfg.target, b, s, m=cfg.resolution) if center == "fb" else cfg.target.pdf(s)
        vals = _run(lambda rng, n=n, b=b: estimate_at(cfg.target.sample(rng, n), b, s), rngs, cfg.workers)
        z = sqrt(n) * b ** (cfg.d / 4) * (vals - c) / scale
        ks = stats.kstest(z, "norm")
        rep.add(n, b, "ks_statistic", ks.statistic)
        rep.add(n, b, "ks_pvalue", ks.pvalue)
        rep.add(n, b, "mean", z.mean(), z.std(ddof=1) / sqrt(len(z)))
        rep.add(n, b, "variance", z.var(ddof=1))
    return rep


def run_consistency_experiment(cfg, seeds=10, threshold=0.8):
    """sup over S_{bd} grid nodes of |fhat - f|, one replication per seed and n.

    ``decreasing_fraction`` is the share of seeds whose sup error strictly
    decreases along the sample sizes.
    """
    rep = ExperimentReport("consistency")
    grid = make_grid(cfg.d, cfg.resolution)
    fs = _functionals_if_needed(cfg)
    root = np.random.SeedSequence(cfg.seed)
    seed_seqs = root.spawn(seeds)
    sups = np.empty((seeds, len(cfg.sample_sizes)))
    for k, ss in enumerate(seed_seqs):
        rngs = [np.random.default_rng(c) for c in ss.spawn(len(cfg.sample_sizes))]
        for j, (n, rng) in enumerate(zip(cfg.sample_sizes, rngs)):
            b = cfg.bandwidth.resolve(n, fs)
            nodes = grid.nodes[in_inner_region(grid.nodes, b * cfg.d)]
            err = np.abs(estimate(cfg.target.sample(rng, n), b, nodes) - cfg.target.pdf(nodes))
            sups[k, j] = err.max()
    for j, n in enumerate(cfg.sample_sizes):
        mean, se = _mean_se(sups[:, j])
        rep.add(n, cfg.bandwidth.resolve(n, fs), "sup_error", mean, se)
    dec = np.all(np.diff(sups, axis=1) < 0, axis=1)
    frac = float(dec.mean())
    rep.add(0, 0.0, "decreasing_fraction", frac, passed=frac >= threshold)
    rep.passed["decay"] = frac >= threshold
    rep.extra["sups"] = sups
    return rep


def run_mae_experiment(cfg):
    """Grid-quadrature integral of |fhat - f| averaged over replications, against the MAE bound."""
    rep = ExperimentReport("mae")
    grid = make_grid(cfg.d, cfg.resolution)
    f = cfg.target.pdf(grid.nodes)
    fs = functionals(cfg.target, grid)
    streams = _streams(cfg.seed, cfg.sample_sizes, cfg.replications)
    for n, rngs in zip(cfg.sample_sizes, streams):
        b = cfg.bandwidth.resolve(n, fs)

        def one(rng, n=n, b=b):
            fh = estimate_on_grid(Dataset(cfg.target.sample(rng, n)), b, grid)
            return float(grid.weights @ np.abs(fh - f))

        mae, se = _mean_se(_run(one, rngs, cfg.workers))
        bound = mae_bound(fs, n, b)
        rep.add(n, b, "mae", mae, se)
        rep.add(n, b, "mae_bound", bound)
        rep.add(n, b, "ratio", mae / bound, se / bound)
    return rep
