import math

import numpy as np
import pytest
from scipy import stats

from liquidity_es.distributions import GHParams, gig_mean, make_generator
from liquidity_es.fourier import expected_shortfall
from liquidity_es.liquidity import LiquiditySpec, build_loads, loss_generator, sd_of_loss
from liquidity_es.montecarlo import (
    InsufficientTailError,
    MixtureSampler,
    empirical_es,
    estimate_loss_es,
    sample_w,
    simulate_losses,
)

from oracles import mixing_law

FIVE = (1, 2, 4, 6, 12)


def _mean_within(draws, target, k=3.0):
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    assert abs(draws.mean() - target) <= k * se, (draws.mean(), target, se)


def test_vg_mixing_mean():
    _mean_within(sample_w(MixtureSampler(GHParams.vg(0.95), 1), 10**6), 0.95)


def test_student_t_mixing_law():
    p = GHParams.student_t(2.92)
    w = sample_w(MixtureSampler(p, 2), 10**6)
    # the mixing variance is infinite, so also test the whole law
    _mean_within(w, 2.92 / 0.92)
    assert stats.kstest(w[:20000], mixing_law(p).cdf).pvalue > 1e-3


@pytest.mark.parametrize("p", [GHParams.nig(0.49), GHParams.hyp(0.11), GHParams.gig(0.7, 2.0, 3.0)],
                         ids=lambda p: p.label)
def test_gig_mixing_mean_and_law(p):
    w = sample_w(MixtureSampler(p, 3), 10**6)
    assert np.all(w > 0)
    _mean_within(w, gig_mean(p.lam, p.chi, p.kappa))
    assert stats.kstest(w[:20000], mixing_law(p).cdf).pvalue > 1e-3


def test_gauss_mixing_is_one():
    assert np.all(sample_w(MixtureSampler(GHParams.gauss()), 10) == 1.0)


def test_seed_determinism():
    p = GHParams.nig(0.49)
    a = sample_w(MixtureSampler(p, 42), 1000)
    b = sample_w(MixtureSampler(p, 42), 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_w(MixtureSampler(p, 43), 1000))
    spec = LiquiditySpec.one_factor_per_bucket(FIVE, 0.5)
    x = simulate_losses(spec, p, 120_000, seed=7)
    y = simulate_losses(spec, p, 120_000, seed=7)
    assert np.array_equal(x, y)


@pytest.mark.parametrize("p", [GHParams.nig(0.49), GHParams.vg(0.95)], ids=lambda p: p.label)
def test_loss_variance_matches_prediction(p):
    spec = LiquiditySpec.one_factor_per_bucket(FIVE, 0.5)
    losses = simulate_losses(spec, p, 400_000, seed=11)
    predicted = sd_of_loss(build_loads(spec), spec, make_generator(p).sd) ** 2
    n = losses.size
    m2 = losses.var()
    se = math.sqrt((np.mean((losses - losses.mean()) ** 4) - m2**2) / n)
    assert abs(losses.var(ddof=1) - predicted) <= 3 * se


def test_mixing_variable_shared_across_coordinates():
    # one step, two uncorrelated factors with unit weights: L = sqrt(W)(V1 + V2)
    p = GHParams.nig(0.49)
    spec = LiquiditySpec((1,), [[1.0, 1.0]], np.eye(2))
    losses = simulate_losses(spec, p, 400_000, seed=5)
    w = mixing_law(p)
    elliptical = 3 * w.var() / w.mean() ** 2
    measured = stats.kurtosis(losses)
    # independent W per coordinate would halve the excess kurtosis
    assert abs(measured - elliptical) < abs(measured - elliptical / 2)
    assert measured == pytest.approx(elliptical, rel=0.15)


def test_gauss_single_bucket_es():
    spec = LiquiditySpec.one_factor_per_bucket((1,), 0.0)
    est, se = estimate_loss_es(spec, GHParams.gauss(), 0.975, 200_000, seed=3)
    exact = stats.norm.pdf(stats.norm.ppf(0.975)) / 0.025
    assert abs(est - exact) <= 3 * se


@pytest.mark.parametrize("p,horizons,rho,alpha", [
    (GHParams.student_t(2.92), (1, 2), 0.0, 0.95),
    (GHParams.nig(0.49), FIVE, 0.5, 0.975),
], ids=["t-two-bucket", "nig-five-bucket"])
def test_agrees_with_fourier(p, horizons, rho, alpha):
    spec = LiquiditySpec.one_factor_per_bucket(horizons, rho)
    est, se = estimate_loss_es(spec, p, alpha, 300_000, seed=17)
    exact = expected_shortfall(loss_generator(spec, make_generator(p)), alpha)
    assert abs(est - exact) <= 3 * se


def test_empirical_es_known_sample():
    losses = np.arange(1.0, 1001.0)
    rng = np.random.default_rng(0)
    rng.shuffle(losses)
    es, se = empirical_es(losses, 0.9)
    assert es == 950.5
    assert se > 0


def test_insufficient_tail():
    with pytest.raises(InsufficientTailError):
        empirical_es(np.arange(1000.0), 0.95)


def test_path_count_validation():
    spec = LiquiditySpec.one_factor_per_bucket((1,), 0.0)
    with pytest.raises(ValueError):
        estimate_loss_es(spec, GHParams.gauss(), 0.975, 5000, seed=0)
    with pytest.raises(ValueError):
        sample_w(MixtureSampler(GHParams.gauss()), 0)
