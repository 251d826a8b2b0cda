import numpy as np
import pytest

from dirichlet_kde.asymptotics import b_opt_mise
from dirichlet_kde.bandwidth import fit_pilot, lscv, lscv_criterion, plug_in, rule_of_thumb
from dirichlet_kde.dirichlet import density, kernel_params_at
from dirichlet_kde.errors import DatasetTooSmall, DegenerateSample
from dirichlet_kde.simplex import make_grid
from dirichlet_kde.target import BETA22, TargetDensity

GRID1 = make_grid(1, 400)


def test_rule_of_thumb_examples():
    assert rule_of_thumb(1024, 1) == pytest.approx(0.0625)
    assert rule_of_thumb(1, 3) == 1.0
    assert rule_of_thumb(256, 4) == pytest.approx(0.25)


def test_fit_pilot_recovers_parameters():
    x = TargetDensity.single([2.0, 2.0], 2.0).sample(np.random.default_rng(1), 100_000)
    full = fit_pilot(x).pilot.components[0].full
    np.testing.assert_allclose(full, [2, 2, 2], rtol=0.05)


def test_fit_pilot_uniform():
    x = np.random.default_rng(2).uniform(size=(100_000, 1))
    fit = fit_pilot(x)
    np.testing.assert_allclose(fit.pilot.components[0].full, [1.0, 1.0], rtol=0.1)
    assert abs(fit.pilot.weights[0] - 1.0) < 1e-15


def test_fit_pilot_errors():
    with pytest.raises(DegenerateSample):
        fit_pilot(np.full((10, 2), 0.25))
    with pytest.raises(DatasetTooSmall):
        fit_pilot(np.array([[0.2, 0.3], [0.1, 0.1], [0.3, 0.3]]))


def test_plug_in_matches_oracle():
    oracle = b_opt_mise(BETA22, 4000, GRID1)
    picks = [plug_in(BETA22.sample(seed, 4000), GRID1).b for seed in range(20)]
    assert abs(np.median(picks) / oracle - 1) <= 0.25


def test_plug_in_is_b_opt_of_pilot():
    x = BETA22.sample(11, 3000)
    pilot = fit_pilot(x).pilot
    assert plug_in(x, GRID1).b == b_opt_mise(pilot, 3000, GRID1)


def test_plug_in_uniform_falls_back():
    x = np.random.default_rng(3).uniform(size=(20_000, 1))
    sel = plug_in(x, GRID1)
    assert sel.fallback and sel.b == rule_of_thumb(20_000, 1)


def test_plug_in_rate():
    n1, n2 = 2000, int(round(2000 * 2**2.5))
    b1 = np.median([plug_in(BETA22.sample(s, n1), GRID1).b for s in range(5)])
    b2 = np.median([plug_in(BETA22.sample(100 + s, n2), GRID1).b for s in range(5)])
    assert b2 / b1 == pytest.approx(0.5, rel=0.05)


def _lscv_brute(data, b, grid):
    n = len(data)
    k = np.array([[density(kernel_params_at(xi, b), xj) for xj in data] for xi in data])
    loo = (k.sum(axis=1) - np.diag(k)) / (n - 1)
    fh = np.array([np.mean([density(kernel_params_at(s, b), xj) for xj in data]) for s in grid.nodes])
    return grid.weights @ fh**2 - 2 * loo.mean()


def test_lscv_criterion_brute_force():
    data = BETA22.sample(5, 50)
    grid = make_grid(1, 60)
    for b in (0.03, 0.1):
        assert lscv_criterion(data, b, grid) == pytest.approx(_lscv_brute(data, b, grid), abs=1e-10)


def test_lscv_single_candidate_and_errors():
    data = BETA22.sample(6, 40)
    assert lscv(data, [0.07], GRID1).b == 0.07
    with pytest.raises(DatasetTooSmall):
        lscv([[0.3]], [0.1], GRID1)
    with pytest.raises(ValueError):
        lscv(data, [], GRID1)


def test_lscv_permutation_invariant():
    data = BETA22.sample(7, 200)
    perm = data[np.random.default_rng(0).permutation(200)]
    for b in (0.01, 0.05):
        assert lscv_criterion(perm, b, GRID1) == pytest.approx(lscv_criterion(data, b, GRID1), rel=1e-12)


def test_lscv_ties_prefer_larger():
    data = BETA22.sample(8, 50)
    sel = lscv(data, [0.05, 0.05 * (1 + 1e-17), 0.05], GRID1)
    assert sel.b == 0.05
    sel, cand, scores = lscv(data, [0.04, 0.04], GRID1, return_scores=True)
    assert scores[0] == scores[1] and sel.b == 0.04


@pytest.mark.slow
def test_lscv_near_oracle():
    oracle = b_opt_mise(BETA22, 4000, GRID1)
    hits = 0
    for seed in range(20):
        b = lscv(BETA22.sample(seed, 4000), grid=GRID1).b
        assert 0 < b <= 1
        hits += 0.5 <= b / oracle <= 2
    assert hits > 10
