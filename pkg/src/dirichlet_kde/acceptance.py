"""The thirteen acceptance checks, each returning a :class:`CriterionResult`.

Thresholds default to ``THRESHOLDS`` and every stochastic check uses the
fixed master seed, so a run is reproducible bit for bit.
"""

import csv
import os
import tempfile
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .asymptotics import (
    A_b,
    b_opt_mae,
    b_opt_mise,
    b_opt_mse,
    functionals,
    g_at,
    mae_bound,
    mise_approx,
    numeric_argmin,
    psi,
)
from .concentration import dirichlet_tail_bound, hoeffding_bound
from .dirichlet import (
    DirichletParams,
    density,
    density_difference_bound,
    density_sup_bound,
    log_density_param_gradient,
    mode,
    sample as dirichlet_sample,
)
from .estimator import estimate_on_grid, smoothed_mean
from .experiments import (
    DEFAULT_SEED,
    BandwidthRule,
    ExperimentConfig,
    run_consistency_experiment,
    run_mae_experiment,
    run_normality_experiment,
    run_rate_experiment,
    run_variance_experiment,
)
from .io import write_grid
from .simplex import in_inner_region, make_grid
from .target import BETA22, MIXTURE_A

THRESHOLDS = {
    1: (-0.80, 0.10),
    2: (-2.0 / 3.0, 0.12),
    3: 0.15,
    4: 0.25,
    5: 0.10,
    6: 0.0727,
    7: 0.03,
    8: 1e-6,
    9: 0,
    10: 1e-5,
    11: 0.8,
    12: 1.2,
    13: 0.15,
}

NAMES = {
    1: "MISE rate d=1",
    2: "MISE rate d=2",
    3: "interior variance constant",
    4: "boundary variance factor",
    5: "bias constant",
    6: "asymptotic normality",
    7: "kernel L2-norm constant",
    8: "optimal-bandwidth identities",
    9: "bound domination suite",
    10: "derivative checks",
    11: "uniform consistency decay",
    12: "MAE bound",
    13: "density grid pipeline",
}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    value: float
    threshold: object
    passed: bool
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.number:2d} {self.name}: value={self.value:.6g} threshold={self.threshold} {self.detail}".rstrip()


def _result(k, value, passed, detail=""):
    return CriterionResult(k, NAMES[k], float(value), THRESHOLDS[k], bool(passed), detail)


def _rate(k, target, m, reps, seed, workers):
    cfg = ExperimentConfig(target, (500, 1000, 2000, 4000, 8000), BandwidthRule.opt_mise(), reps, seed, m, workers=workers)
    rep = run_rate_experiment(cfg)
    centre, tol = THRESHOLDS[k]
    return _result(k, rep.slope, abs(rep.slope - centre) <= tol, f"(+/- {rep.half_width:.3f} fit)")


def criterion_1(seed=DEFAULT_SEED, workers=1):
    return _rate(1, BETA22, 400, 100, seed, workers)


def criterion_2(seed=DEFAULT_SEED, workers=1):
    return _rate(2, MIXTURE_A, 120, 50, seed, workers)


def _variance(k, s, regime, seed, workers):
    cfg = ExperimentConfig(BETA22, (20000,), BandwidthRule.fixed(0.02), 2000, seed, workers=workers)
    rep = run_variance_experiment(cfg, [s], regime)
    err = rep.get("relative_error")
    emp, exact = rep.get("empirical_variance"), rep.get("exact_variance")
    detail = f"(empirical/approx={emp / rep.get('approx_variance'):.4f}, empirical/finite-b exact={emp / exact:.4f})"
    return _result(k, err, err <= THRESHOLDS[k], detail)


def criterion_3(seed=DEFAULT_SEED, workers=1):
    return _variance(3, 0.5, "interior", seed, workers)


def criterion_4(seed=DEFAULT_SEED, workers=1):
    return _variance(4, 0.02, "boundary", seed, workers)


def criterion_5(seed=DEFAULT_SEED, workers=1):
    b = 0.005
    fb = smoothed_mean(BETA22, b, [0.5], m=4000)
    ratio = (fb - BETA22.pdf([0.5])) / b
    g = g_at(BETA22, [0.5])
    err = abs(ratio / g - 1.0)
    return _result(5, err, err <= THRESHOLDS[5], f"(ratio={ratio:.6f}, g={g:.6f})")


def criterion_6(seed=DEFAULT_SEED, workers=1):
    cfg = ExperimentConfig(BETA22, (4000,), BandwidthRule.power(1.0, -0.4), 500, seed, workers=workers)
    rep = run_normality_experiment(cfg, [0.5])
    ks = rep.get("ks_statistic")
    detail = f"(mean={rep.get('mean'):.4f}, variance={rep.get('variance'):.4f})"
    return _result(6, ks, ks <= THRESHOLDS[6], detail)


def criterion_7(seed=DEFAULT_SEED, workers=1):
    b = 1e-3
    p = psi([0.5])
    err = abs(sqrt(b) * A_b([0.5], b) - p) / p
    return _result(7, err, err <= THRESHOLDS[7])


def criterion_8(seed=DEFAULT_SEED, workers=1):
    """Closed-form optima against bounded Brent minimization of each two-term objective."""
    worst = 0.0
    cases = [(BETA22, [0.5]), (MIXTURE_A, [0.3, 0.3])]
    for target, s in cases:
        fs = functionals(target)
        d = target.d
        pf, g = psi(s) * target.pdf(s), g_at(target, s)
        for n in (100, 1000, 10_000, 100_000):
            pairs = [
                (b_opt_mse(target, s, n), lambda b: b ** (-d / 2) * pf / n + b * b * g * g),
                (b_opt_mise(fs, n), lambda b: mise_approx(fs, n, b)),
                (b_opt_mae(fs, n), lambda b: mae_bound(fs, n, b)),
            ]
            for closed, obj in pairs:
                worst = max(worst, abs(numeric_argmin(obj) / closed - 1.0))
    return _result(8, worst, worst <= THRESHOLDS[8])


def _random_params(rng, d, lo=2.0, hi=30.0):
    return DirichletParams(rng.uniform(lo, hi, d), rng.uniform(lo, hi))


def bound_violations(seed=DEFAULT_SEED):
    """Counts of bound violations for the sup, difference, Dirichlet-tail and Hoeffding bounds."""
    rng = np.random.default_rng(seed)
    grids = {1: make_grid(1, 2000), 2: make_grid(2, 200)}
    out = {"sup": 0, "difference": 0, "tail": 0, "hoeffding": 0}
    for k in range(50):
        d = 1 + k % 2
        p = _random_params(rng, d)
        peak = max(np.max(density(p, grids[d].nodes)), density(p, mode(p)))
        out["sup"] += peak > density_sup_bound(p)
    delta = 0.05
    for k in range(20):
        d = 1 + k % 2
        p1 = _random_params(rng, d)
        step = rng.uniform(-0.5, 0.5, d + 1)
        p2 = DirichletParams(np.maximum(p1.alpha + step[:-1], 2.0), max(p1.beta + step[-1], 2.0))
        nodes = grids[d].nodes[in_inner_region(grids[d].nodes, delta)]
        gap = np.max(np.abs(density(p2, nodes) - density(p1, nodes)))
        out["difference"] += gap > density_difference_bound(p1, p2, delta, 1.0)
    draws = 200_000
    for k in range(10):
        d = 1 + k % 2
        p = _random_params(rng, d, 0.5, 20.0)
        x = dirichlet_sample(p, rng, draws)
        mean = p.alpha / p.total
        t = np.full(d, rng.uniform(0.02, 0.2))
        freq = np.mean(np.all(np.abs(x - mean) >= t, axis=1))
        out["tail"] += freq > dirichlet_tail_bound(p, t)
    for k in range(10):
        n = int(rng.choice([20, 50, 100, 200]))
        t = float(rng.uniform(0.5, 2.0)) * sqrt(n)
        sums = rng.binomial(n, 0.5, size=draws) - n / 2
        out["hoeffding"] += np.mean(sums >= t) > hoeffding_bound(n, 1.0, t)
    return out


def criterion_9(seed=DEFAULT_SEED, workers=1):
    v = bound_violations(seed)
    total = sum(v.values())
    return _result(9, total, total <= THRESHOLDS[9], "(" + ", ".join(f"{k}={c}" for k, c in v.items()) + ")")


def _fd_rel(a, fd):
    return np.linalg.norm(np.ravel(a) - np.ravel(fd)) / max(np.linalg.norm(np.ravel(fd)), 1e-300)


def derivative_errors(seed=DEFAULT_SEED, h=1e-5):
    """Worst relative FD discrepancy of the mixture gradient, Hessian and parameter gradient."""
    rng = np.random.default_rng(seed)
    target = MIXTURE_A
    pts = []
    while len(pts) < 50:
        s = rng.dirichlet(np.ones(3))[:2]
        if in_inner_region(s, 0.05):
            pts.append(s)
    worst = {"gradient": 0.0, "hessian": 0.0, "param_gradient": 0.0}
    eye = np.eye(2)
    for s in pts:
        fd_g = np.array([(target.pdf(s + h * e) - target.pdf(s - h * e)) / (2 * h) for e in eye])
        fd_h = np.array([(target.gradient(s + h * e) - target.gradient(s - h * e)) / (2 * h) for e in eye])
        worst["gradient"] = max(worst["gradient"], _fd_rel(target.gradient(s), fd_g))
        worst["hessian"] = max(worst["hessian"], _fd_rel(target.hessian(s), fd_h))
        p = _random_params(rng, 2, 0.5, 10.0)
        da, db = log_density_param_gradient(p, s)
        fd = []
        full = p.full
        for j in range(3):
            up, dn = full.copy(), full.copy()
            up[j] += h
            dn[j] -= h
            fd.append((density(DirichletParams(up[:-1], up[-1]), s) - density(DirichletParams(dn[:-1], dn[-1]), s)) / (2 * h))
        worst["param_gradient"] = max(worst["param_gradient"], _fd_rel(np.append(da, db), fd))
    return worst


def criterion_10(seed=DEFAULT_SEED, workers=1):
    w = derivative_errors(seed)
    top = max(w.values())
    return _result(10, top, top <= THRESHOLDS[10], "(" + ", ".join(f"{k}={v:.2e}" for k, v in w.items()) + ")")


def criterion_11(seed=DEFAULT_SEED, workers=1):
    cfg = ExperimentConfig(BETA22, (1000, 4000, 16000), BandwidthRule.power(1.0, -0.25), 1, seed)
    rep = run_consistency_experiment(cfg, seeds=10, threshold=THRESHOLDS[11])
    frac = rep.get("decreasing_fraction")
    sups = rep.values("sup_error")
    return _result(11, frac, frac >= THRESHOLDS[11], "(mean sup errors " + ", ".join(f"{v:.4f}" for v in sups) + ")")


def criterion_12(seed=DEFAULT_SEED, workers=1):
    cfg = ExperimentConfig(BETA22, (4000,), BandwidthRule.opt_mae(), 200, seed, 400, workers=workers)
    rep = run_mae_experiment(cfg)
    ratio = rep.get("ratio")
    return _result(12, ratio, ratio <= THRESHOLDS[12], f"(MAE={rep.get('mae'):.5f}, bound={rep.get('mae_bound'):.5f})")


def density_pipeline_l1(seed=DEFAULT_SEED, n=10_000, m=120):
    """Simulate the first mixture, write the estimate on a grid to CSV, read it back and return the grid L1 error."""
    target = MIXTURE_A
    data = target.sample(np.random.default_rng(seed), n)
    grid = make_grid(2, m)
    fh = estimate_on_grid(data, n ** (-1.0 / 3.0), grid)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "grid.csv")
        write_grid(path, grid.nodes, fh)
        with open(path, newline="", encoding="utf-8") as fh_in:
            rows = list(csv.reader(fh_in))[1:]
    back = np.array(rows, dtype=float)
    return float(grid.weights @ np.abs(back[:, 2] - target.pdf(back[:, :2])))


def criterion_13(seed=DEFAULT_SEED, workers=1):
    l1 = density_pipeline_l1(seed)
    return _result(13, l1, l1 <= THRESHOLDS[13])


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 14)}


def run(numbers=None, seed=DEFAULT_SEED, workers=1, thresholds=None):
    """Run the chosen criteria; ``thresholds`` overrides entries of THRESHOLDS for this call."""
    saved = dict(THRESHOLDS)
    THRESHOLDS.update(thresholds or {})
    try:
        return [CRITERIA[k](seed=seed, workers=workers) for k in (numbers or sorted(CRITERIA))]
    finally:
        THRESHOLDS.clear()
        THRESHOLDS.update(saved)
