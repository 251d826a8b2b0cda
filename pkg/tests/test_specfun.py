import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_kde.errors import DomainError
from dirichlet_kde.specfun import digamma, log_beta_multi, log_gamma, log_stirling_ratio, stirling_ratio

# frozen from mpmath at 30 digits
LGAMMA = {
    0.1: 2.252712651734205902,
    0.5: 0.57236494292470008707,
    2.5: 0.28468287047291915963,
    7.3: 7.1478925230222486921,
    10.0: 12.801827480081469611,
    25.5: 56.389167643719946744,
    150.0: 600.00947055532742811,
    1e4: 82099.717496442377273,
}
DIGAMMA = {
    0.1: -10.423754940411076232,
    0.5: -1.9635100260214234794,
    1.0: -0.57721566490153286061,
    2.5: 0.70315664064524318723,
    7.3: 1.9178203356379860723,
    25.5: 3.2189424728839197665,
    1e4: 9.2102903711428494036,
}


@pytest.mark.parametrize("z,expected", sorted(LGAMMA.items()))
def test_log_gamma_oracle(z, expected):
    assert abs(log_gamma(z) - expected) <= 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize("z,expected", sorted(DIGAMMA.items()))
def test_digamma_oracle(z, expected):
    assert abs(digamma(z) - expected) <= 1e-10


def test_log_gamma_examples():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-12)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-12)
    assert log_gamma(11.0) == pytest.approx(math.log(math.factorial(10)), abs=1e-12)


def test_log_gamma_range_against_math():
    z = np.geomspace(1e-6, 1e8, 400)
    ref = np.array([math.lgamma(v) for v in z])
    np.testing.assert_allclose(log_gamma(z), ref, rtol=1e-14, atol=1e-12)


def test_digamma_examples():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-10)
    assert digamma(2.0) == pytest.approx(0.4227843350984671, abs=1e-10)
    assert digamma(3.0) - digamma(2.0) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)
    with pytest.raises(DomainError):
        digamma(bad)


def test_vectorized_shapes():
    z = np.array([[0.5, 1.0], [2.0, 3.0]])
    assert log_gamma(z).shape == (2, 2)
    assert isinstance(log_gamma(2.0), float)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 50.0))
def test_gamma_recurrence(z):
    lhs = math.exp(log_gamma(z + 1.0))
    rhs = z * math.exp(log_gamma(z))
    assert lhs == pytest.approx(rhs, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 100.0))
def test_digamma_matches_fd_of_log_gamma(z):
    h = 1e-5
    fd = (log_gamma(z + h) - log_gamma(z - h)) / (2 * h)
    assert abs(digamma(z) - fd) <= 1e-6


def test_stirling_ratio_examples():
    assert stirling_ratio(0.0) == 0.0
    assert stirling_ratio(1.0) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-1.0), abs=1e-10)
    assert stirling_ratio(100.0) == pytest.approx(1 - 1 / 1200, abs=1e-6)
    # mpmath: sqrt(2 pi) e^-5 5^5.5 / 5!
    assert stirling_ratio(5.0) == pytest.approx(0.98349306631325066654, rel=1e-13)
    assert stirling_ratio(50.0) < stirling_ratio(100.0) < 1.0


def test_stirling_ratio_bounded_and_increasing():
    z = np.geomspace(1.0, 1e6, 500)
    r = stirling_ratio(z)
    assert np.all((r > 0) & (r < 1))
    assert np.all(np.diff(r) > 0)


def test_log_stirling_ratio_continuous_at_switch():
    below, above = log_stirling_ratio(10.0 - 1e-9), log_stirling_ratio(10.0 + 1e-9)
    assert abs(below - above) < 1e-11


def test_log_beta_multi():
    got = log_beta_multi(np.array([2.0, 3.0, 4.0]))
    assert got == pytest.approx(math.lgamma(2) + math.lgamma(3) + math.lgamma(4) - math.lgamma(9), abs=1e-12)
