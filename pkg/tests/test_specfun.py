import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from liquidity_es.specfun import bessel_k, log_bessel_k, log_gamma


def k_by_integral(order, x):
    # K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt
    upper = math.acosh(1.0 + 800.0 / x)
    val, _ = integrate.quad(
        lambda t: 0.5 * (math.exp(-x * math.cosh(t) + order * t) + math.exp(-x * math.cosh(t) - order * t)),
        0, upper, epsabs=0, epsrel=1e-13, limit=200)
    return val


@pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 7.5, 40.0])
def test_half_order_closed_form(x):
    assert bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-13)


def test_k1_at_one():
    assert bessel_k(1, 1.0) == pytest.approx(0.6019072301972346, rel=1e-14)


@pytest.mark.parametrize("order,x", [(0, 0.5), (1, 2.0), (2.5, 0.1), (-1.7, 3.3), (4, 12.0)])
def test_matches_integral_representation(order, x):
    assert bessel_k(order, x) == pytest.approx(k_by_integral(order, x), rel=1e-10)


@given(st.floats(-3, 3), st.floats(0.01, 100))
@settings(max_examples=200, deadline=None)
def test_order_symmetry_and_recurrence(order, x):
    assert bessel_k(-order, x) == bessel_k(order, x)
    # K_{v+1} = K_{v-1} + (2v/x) K_v
    lhs = bessel_k(order + 1, x)
    rhs = bessel_k(order - 1, x) + 2 * order / x * bessel_k(order, x)
    assert lhs == pytest.approx(rhs, rel=1e-9)


@given(st.floats(0, 3), st.floats(0.01, 50), st.floats(0.01, 50))
@settings(max_examples=100, deadline=None)
def test_decreasing_in_argument(order, x, y):
    lo, hi = sorted((x, y))
    if hi > lo * (1 + 1e-9):
        assert bessel_k(order, hi) < bessel_k(order, lo)


@pytest.mark.parametrize("x", [1e-3, 1.0, 50.0, 800.0, 5000.0])
def test_log_bessel_no_underflow(x):
    val = log_bessel_k(1.3, x)
    assert math.isfinite(val)
    if x < 500:
        assert val == pytest.approx(math.log(bessel_k(1.3, x)), rel=1e-12, abs=1e-12)
    else:
        # K_v(x) ~ sqrt(pi / 2x) e^{-x} (1 + (4v^2 - 1) / 8x)
        approx = 0.5 * math.log(math.pi / (2 * x)) - x + math.log1p((4 * 1.3**2 - 1) / (8 * x))
        assert val == pytest.approx(approx, abs=1e-5)


def test_vectorized():
    xs = np.array([0.5, 1.0, 2.0])
    out = bessel_k(1, xs)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(0.6019072301972346, rel=1e-14)


def test_log_gamma_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
    assert log_gamma(1e5) == pytest.approx(math.lgamma(1e5), rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        bessel_k(1.0, bad)
    with pytest.raises(ValueError):
        log_bessel_k(1.0, bad)


def test_bad_order():
    with pytest.raises(ValueError):
        bessel_k(math.nan, 1.0)
