import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from liquidity_es.distributions import GHParams, make_generator, power_generator
from liquidity_es.fourier import (
    ConvergenceError,
    InversionSettings,
    cdf,
    density,
    expected_shortfall,
    shortfall_integrand,
    truncated_mean,
    value_at_risk,
)

GAUSS = make_generator(GHParams.gauss())
NIG = make_generator(GHParams.nig(0.49))


def t_es(nu, alpha):
    q = stats.t.ppf(alpha, nu)
    return stats.t.pdf(q, nu) / (1 - alpha) * (nu + q * q) / (nu - 1)


def series_piece(u, x):
    # u sin u + cos u - 1 = sum_k (-1)^(k+1) (2k-1) u^(2k) / (2k)!
    total = math.fsum((-1) ** (k + 1) * (2 * k - 1) * u ** (2 * k) / math.factorial(2 * k) for k in range(1, 15))
    return total * x * x / (u * u)


@pytest.mark.parametrize("u", [1e-7, 1e-4, 5e-3, 0.0199, 0.0201, 0.1, 0.5])
def test_kernel_near_origin(u):
    x, a = 3.0, 1.0
    s = u / x
    expected = series_piece(u, x) - series_piece(a * s, a)
    assert shortfall_integrand(s, a, x) == pytest.approx(expected, rel=1e-10)


def test_kernel_limit_at_zero():
    assert shortfall_integrand(0.0, 1.0, 3.0) == pytest.approx(4.0, rel=1e-15)


def test_gauss_density_grid():
    ys = np.linspace(-4.5, 4.5, 20)
    for y in ys:
        assert density(GAUSS, y) == pytest.approx(stats.norm.pdf(y), abs=1e-8)


@pytest.mark.parametrize("y", [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0])
def test_gauss_cdf(y):
    assert cdf(GAUSS, y) == pytest.approx(0.5 * (1 + math.erf(y / math.sqrt(2))), abs=1e-8)


@pytest.mark.parametrize("nu", [2.92, 5.0])
@pytest.mark.parametrize("y", [0.0, 0.7, -2.0, 6.0])
def test_student_t_density_and_cdf(nu, y):
    g = make_generator(GHParams.student_t(nu))
    assert density(g, y) == pytest.approx(stats.t.pdf(y, nu), abs=1e-9)
    assert cdf(g, y) == pytest.approx(stats.t.cdf(y, nu), abs=1e-9)


@pytest.mark.parametrize("nu", [2.92, 5.0, 10.0])
@pytest.mark.parametrize("alpha", [0.95, 0.975, 0.99])
def test_student_t_var_and_es(nu, alpha):
    g = make_generator(GHParams.student_t(nu))
    assert value_at_risk(g, alpha) == pytest.approx(stats.t.ppf(alpha, nu), rel=1e-9)
    assert expected_shortfall(g, alpha) == pytest.approx(t_es(nu, alpha), rel=1e-6)


@pytest.mark.parametrize("alpha", [0.95, 0.975, 0.99])
def test_gauss_es(alpha):
    q = stats.norm.ppf(alpha)
    assert expected_shortfall(GAUSS, alpha) == pytest.approx(stats.norm.pdf(q) / (1 - alpha), rel=1e-10)


@pytest.mark.parametrize("a,b", [(-1.0, 2.0), (0.5, 3.0), (-4.0, -1.0), (2.0, 30.0)])
def test_truncated_mean_against_density_quadrature(a, b):
    nu = 2.92
    g = make_generator(GHParams.student_t(nu))
    direct, _ = integrate.quad(lambda y: y * stats.t.pdf(y, nu), a, b, epsabs=1e-13, epsrel=1e-12)
    assert truncated_mean(g, a, b) == pytest.approx(direct, abs=1e-9)


@given(st.floats(-6, 6), st.floats(0.05, 4), st.floats(0.05, 4))
@settings(max_examples=15, deadline=None)
def test_truncated_mean_additive(a, d1, d2):
    b, c = a + d1, a + d1 + d2
    whole = truncated_mean(NIG, a, c)
    parts = truncated_mean(NIG, a, b) + truncated_mean(NIG, b, c)
    assert whole == pytest.approx(parts, abs=1e-10)


@given(st.floats(-6, 6), st.floats(0.05, 6))
@settings(max_examples=15, deadline=None)
def test_truncated_mean_antisymmetric(a, width):
    b = a + width
    assert truncated_mean(NIG, -b, -a) == pytest.approx(-truncated_mean(NIG, a, b), abs=1e-10)


@pytest.mark.parametrize("p", [GHParams.vg(0.95), GHParams.hyp(0.11), GHParams.nig(0.49)], ids=lambda p: p.label)
@pytest.mark.parametrize("alpha", [0.95, 0.99])
def test_cdf_inverts_var(p, alpha):
    g = make_generator(p)
    q = value_at_risk(g, alpha)
    assert cdf(g, q) == pytest.approx(alpha, abs=1e-8)
    es = expected_shortfall(g, alpha, var=q)
    assert es > q


def test_density_integrates_to_one():
    g = make_generator(GHParams.vg(0.95))
    mass, _ = integrate.quad(lambda y: density(g, y), 0, 12, epsabs=1e-10, limit=100)
    tail = 1 - cdf(g, 12.0)
    assert 2 * (mass + tail) == pytest.approx(1.0, abs=1e-8)


def test_es_monotone_in_alpha():
    vals = [expected_shortfall(NIG, a) for a in (0.9, 0.95, 0.975, 0.99)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_es_scales_with_power():
    # sum of 4 iid Gaussians has sd 2
    g4 = power_generator(GAUSS, 4)
    assert expected_shortfall(g4, 0.975) == pytest.approx(2 * expected_shortfall(GAUSS, 0.975), rel=1e-9)


def test_history_settles():
    es, history = expected_shortfall(NIG, 0.975, return_history=True)
    assert history[-1][1] == es
    bs = [b for b, _ in history]
    assert all(y == 2 * x for x, y in zip(bs, bs[1:]))


def test_convergence_failure_reported():
    cfg = InversionSettings(max_iter=2)
    with pytest.raises(ConvergenceError):
        expected_shortfall(make_generator(GHParams.student_t(2.92)), 0.99, cfg)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 0.2, math.nan])
def test_alpha_domain(alpha):
    with pytest.raises(ValueError):
        expected_shortfall(GAUSS, alpha)


def test_truncated_mean_requires_order():
    with pytest.raises(ValueError):
        truncated_mean(GAUSS, 1.0, 1.0)
    with pytest.raises(ValueError):
        truncated_mean(GAUSS, 0.0, math.inf)


@pytest.mark.parametrize("kw", [{"eps_trunc": 0.0}, {"b_growth": 1.0}, {"max_iter": 1}, {"b_stop_tol": -1e-3}])
def test_settings_validation(kw):
    with pytest.raises(ValueError):
        InversionSettings(**kw)
