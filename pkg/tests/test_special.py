import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from mixcit.errors import ConfigurationError, DomainError
from mixcit.special import EULER_GAMMA, digamma, log_unit_ball_volume


def test_digamma_at_one():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-12)


def test_digamma_half():
    # psi(1/2) = -gamma - 2 ln 2
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * math.log(2), abs=1e-11)


def test_digamma_integers_are_harmonic():
    for n in (2, 5, 17, 120):
        harmonic = sum(1.0 / j for j in range(1, n))
        assert digamma(n) == pytest.approx(harmonic - EULER_GAMMA, abs=1e-10)


@given(st.floats(min_value=1e-4, max_value=1e8))
def test_digamma_recurrence(x):
    assert abs(digamma(x + 1) - digamma(x) - 1 / x) < 1e-10


@given(st.floats(min_value=1e-300, max_value=1e-4))
def test_digamma_recurrence_tiny_arguments(x):
    # 1/x itself carries rounding above 1e-10 here, so compare relatively
    assert digamma(x + 1) - digamma(x) == pytest.approx(1 / x, rel=1e-14)


@given(st.floats(min_value=1e-3, max_value=1e8))
def test_digamma_below_log(x):
    assert digamma(x) < math.log(x)


@settings(max_examples=200)
@given(st.floats(min_value=1e-3, max_value=1e6))
def test_digamma_matches_scipy(x):
    assert digamma(x) == pytest.approx(float(scipy.special.digamma(x)), abs=1e-10, rel=1e-12)


def test_digamma_vectorized_shape():
    x = np.arange(1, 13, dtype=float).reshape(3, 4)
    out = digamma(x)
    assert out.shape == (3, 4)
    np.testing.assert_allclose(out, scipy.special.digamma(x), atol=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_digamma_domain(bad):
    with pytest.raises(DomainError):
        digamma(bad)


def test_digamma_domain_in_array():
    with pytest.raises(DomainError):
        digamma(np.array([1.0, 0.0]))


def test_ball_volume():
    assert log_unit_ball_volume(1) == pytest.approx(math.log(2))
    assert log_unit_ball_volume(3) == pytest.approx(3 * math.log(2))
    with pytest.raises(ConfigurationError):
        log_unit_ball_volume(2, p_norm=2)
    with pytest.raises(ConfigurationError):
        log_unit_ball_volume(0)
