import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_kde.dirichlet import (
    DirichletParams,
    density,
    density_difference_bound,
    density_sup_bound,
    expectation_difference_bound,
    kernel_params_at,
    log_density,
    log_density_param_gradient,
    mode,
    moments,
    param_derivative_bound,
    sample,
)
from dirichlet_kde.errors import DomainError, InvalidDelta, ParamsBelowTwo, PointOnBoundary, PointOutsideSimplex
from dirichlet_kde.simplex import in_inner_region, integrate, make_grid

params_strategy = st.builds(
    lambda a, b: DirichletParams(np.array(a), b),
    st.lists(st.floats(2.0, 50.0), min_size=1, max_size=2),
    st.floats(2.0, 50.0),
)


def test_params_validation():
    with pytest.raises(DomainError):
        DirichletParams([0.0], 1.0)
    with pytest.raises(DomainError):
        DirichletParams([1.0], -1.0)
    p = DirichletParams([2.0, 3.0], 4.0)
    assert p.total == 9.0 and p.d == 2
    np.testing.assert_array_equal(p.full, [2, 3, 4])
    with pytest.raises(ValueError):
        p.alpha[0] = 5.0


def test_log_density_examples():
    assert log_density(DirichletParams([1.0], 1.0), [0.3]) == pytest.approx(0.0, abs=1e-14)
    assert log_density(DirichletParams([1.0, 1.0], 1.0), [0.2, 0.5]) == pytest.approx(math.log(2), abs=1e-14)
    assert density(DirichletParams([6.0], 6.0), [0.5]) == pytest.approx(2772 / 1024, rel=1e-13)
    # mpmath oracle
    assert log_density(DirichletParams([2.0, 3.0], 4.0), [0.2, 0.3]) == pytest.approx(2.0228711901914416301, abs=1e-12)


def test_log_density_boundary_convention():
    assert log_density(DirichletParams([1.0], 3.0), [0.0]) == pytest.approx(math.log(3.0))
    assert log_density(DirichletParams([2.0], 3.0), [0.0]) == -np.inf
    assert log_density(DirichletParams([0.5], 3.0), [0.0]) == np.inf
    with pytest.raises(PointOutsideSimplex):
        log_density(DirichletParams([2.0], 2.0), [1.2])


@pytest.mark.parametrize("full", [(2, 2, 2), (1.3, 2, 1), (5, 0.8, 3), (40, 30, 20)])
def test_density_integrates_to_one(full):
    p = DirichletParams(np.array(full[:-1], float), full[-1])
    # alpha < 1 has an integrable singularity that the midpoint grid resolves slowly
    tol = 1e-3 if min(full) >= 1 else 1e-2
    assert integrate(lambda s: density(p, s), grid=make_grid(2, 200)) == pytest.approx(1.0, abs=tol)


def test_kernel_params_at_examples():
    p = kernel_params_at([0.5], 0.1, 1)
    np.testing.assert_allclose(p.alpha, [6.0])
    assert p.beta == pytest.approx(6.0)
    p = kernel_params_at([0.5], 0.1, 2)
    np.testing.assert_allclose(p.alpha, [11.0])
    assert p.beta == pytest.approx(11.0)
    assert kernel_params_at([0.0, 0.4], 0.03, 3).alpha[0] == 1.0
    with pytest.raises(DomainError):
        kernel_params_at([0.5], 0.1, 4)


def test_moments_examples():
    mean, cov = moments(kernel_params_at([0.2, 0.3], 0.1))
    assert mean[0] == pytest.approx(0.3 / 1.3, rel=1e-14)
    _, cov = moments(kernel_params_at([0.5], 0.1))
    assert cov[0, 0] == pytest.approx(36 / 1872, rel=1e-14)
    mean, _ = moments(DirichletParams([1.0, 1.0], 1.0))
    np.testing.assert_allclose(mean, [1 / 3, 1 / 3])


def test_moments_match_kernel_closed_form():
    s, b, d = np.array([0.2, 0.3]), 0.07, 2
    mean, cov = moments(kernel_params_at(s, b))
    np.testing.assert_allclose(mean, (s + b) / (1 + b * (d + 1)), rtol=1e-13)


def test_sample_examples(rng):
    n = 200_000
    x = sample(DirichletParams([1.0], 1.0), rng, n)
    assert abs(x.mean() - 0.5) < 3 * math.sqrt(1 / 12 / n)
    x = sample(DirichletParams([2.0, 2.0], 2.0), rng, n)
    np.testing.assert_allclose(x.mean(axis=0), [1 / 3, 1 / 3], atol=3 * math.sqrt(2 / 63 / n))
    x = sample(DirichletParams([1000.0], 1000.0), rng, n)
    assert x.var() == pytest.approx(1e6 / (2000**2 * 2001), rel=0.02)


def test_sample_reproducible():
    p = DirichletParams([2.0, 0.7], 1.5)
    np.testing.assert_array_equal(sample(p, 3, 100), sample(p, 3, 100))


def test_sample_moments_random_sets(rng):
    n = 100_000
    for _ in range(20):
        p = DirichletParams(rng.uniform(0.5, 20, 2), rng.uniform(0.5, 20))
        x = sample(p, rng, n)
        mean, cov = moments(p)
        se = np.sqrt(np.diag(cov) / n)
        assert np.all(np.abs(x.mean(axis=0) - mean) <= 4 * se)
        # variance of the sample variance for a bounded variable is at most E[(x - mu)^4] / n <= var / (4 n)
        vse = np.sqrt(np.diag(cov) / (4 * n))
        assert np.all(np.abs(x.var(axis=0) - np.diag(cov)) <= 4 * vse)


def test_marginal_is_beta(rng):
    from scipy import stats

    p = DirichletParams([2.0, 3.0], 4.0)
    x = sample(p, rng, 20_000)
    assert stats.kstest(x[:, 1], stats.beta(3.0, 6.0).cdf).pvalue > 1e-3


def test_density_sup_bound_examples():
    assert density_sup_bound(DirichletParams([2.0], 2.0)) == pytest.approx(2 * math.sqrt(3))
    p = DirichletParams([6.0], 6.0)
    assert density_sup_bound(p) == pytest.approx(math.sqrt(11 / 25) * 10)
    assert density(p, mode(p)) <= density_sup_bound(p)
    p = DirichletParams([2.0, 2.0], 2.0)
    assert density_sup_bound(p) == pytest.approx(math.sqrt(5) * 9)
    assert np.max(density(p, make_grid(2, 200).nodes)) <= density_sup_bound(p)
    with pytest.raises(ParamsBelowTwo):
        density_sup_bound(DirichletParams([1.5], 3.0))


@settings(max_examples=50, deadline=None)
@given(params_strategy)
def test_sup_bound_dominates(p):
    grid = make_grid(p.d, 2000 if p.d == 1 else 200)
    assert max(np.max(density(p, grid.nodes)), density(p, mode(p))) <= density_sup_bound(p)


def test_param_gradient_example():
    da, db = log_density_param_gradient(DirichletParams([1.0], 1.0), [math.exp(-1)])
    assert da[0] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(PointOnBoundary):
        log_density_param_gradient(DirichletParams([2.0], 2.0), [0.0])


def _fd_param_grad(p, x, h):
    full = p.full
    out = []
    for j in range(len(full)):
        up, dn = full.copy(), full.copy()
        up[j] += h
        dn[j] -= h
        out.append((density(DirichletParams(up[:-1], up[-1]), x) - density(DirichletParams(dn[:-1], dn[-1]), x)) / (2 * h))
    return np.array(out)


def test_param_gradient_fd_66():
    p = DirichletParams([6.0], 6.0)
    da, db = log_density_param_gradient(p, [0.3])
    np.testing.assert_allclose(np.append(da, db), _fd_param_grad(p, [0.3], 1e-6), rtol=1e-5)


def test_param_gradient_fd_random(rng):
    for _ in range(30):
        p = DirichletParams(rng.uniform(0.5, 15, 2), rng.uniform(0.5, 15))
        x = rng.dirichlet(np.ones(3))[:2]
        if not in_inner_region(x, 0.02):
            continue
        da, db = log_density_param_gradient(p, x)
        np.testing.assert_allclose(np.append(da, db), _fd_param_grad(p, x, 1e-5), rtol=1e-5, atol=1e-12)


def test_param_derivative_bound_dominates():
    for a in range(2, 7):
        p = DirichletParams([float(a)], float(a))
        for x in np.arange(0.1, 1.0, 0.1):
            da, db = log_density_param_gradient(p, [x])
            ba, bb = param_derivative_bound(p, [x])
            assert abs(da[0]) <= ba[0] and abs(db) <= bb


def test_difference_bound_examples():
    p1, p2 = DirichletParams([6.0], 6.0), DirichletParams([7.0], 6.0)
    assert density_difference_bound(p1, p1, 0.05, 1.0) == 0.0
    nodes = make_grid(1, 2000).nodes
    nodes = nodes[in_inner_region(nodes, 0.05)]
    gap = np.max(np.abs(density(p2, nodes) - density(p1, nodes)))
    assert gap <= density_difference_bound(p1, p2, 0.05, 1.0)
    assert density_difference_bound(p1, p2, 0.01, 1.0) >= density_difference_bound(p1, p2, 0.05, 1.0)
    with pytest.raises(InvalidDelta):
        density_difference_bound(p1, p2, 0.5, 1.0)


def test_expectation_difference_bound_dominates(rng):
    p1, p2 = DirichletParams([4.0, 3.0], 5.0), DirichletParams([4.5, 3.0], 4.6)
    x = sample(DirichletParams([2.0, 2.0], 2.0), rng, 100_000)
    emp = np.mean(np.abs(density(p2, x) - density(p1, x)))
    assert emp <= expectation_difference_bound(p1, p2, f_sup=120 / 27)
