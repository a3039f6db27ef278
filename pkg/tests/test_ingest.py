import datetime as dt
import math

import numpy as np
import pytest
from scipy import stats

from liquidity_es.ingest import (
    InsufficientDataError,
    PriceSeries,
    ReturnSeries,
    read_price_csv,
    sample_moments,
    to_log_returns,
)


def _series(prices):
    start = dt.date(2008, 1, 1)
    return PriceSeries(tuple(start + dt.timedelta(days=i) for i in range(len(prices))), np.asarray(prices, float))


def _random_walk(n, seed=0):
    rng = np.random.default_rng(seed)
    return 100 * np.exp(np.cumsum(rng.normal(0, 0.01, n)))


def test_read_csv(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("date,price\n2020-01-02,100.5\n2020-01-03,101\n\n2020-01-06,99.25\n")
    s = read_price_csv(path)
    assert s.dates == (dt.date(2020, 1, 2), dt.date(2020, 1, 3), dt.date(2020, 1, 6))
    np.testing.assert_array_equal(s.prices, [100.5, 101.0, 99.25])


@pytest.mark.parametrize("body,match", [
    ("date,price\n2020-01-02,100\n2020-01-03,\n", ":3: missing price"),
    ("date,price\n2020-01-02,100\n2020-01-03,abc\n", ":3: bad price"),
    ("date,price\n01/02/2020,100\n", ":2: bad date"),
    ("day,close\n2020-01-02,100\n", "header"),
    ("date,price\n2020-01-03,100\n2020-01-02,101\n", "increasing"),
    ("date,price\n2020-01-02,-5\n", "positive"),
])
def test_read_csv_errors(tmp_path, body, match):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ValueError, match=match):
        read_price_csv(path)


def test_simple_return():
    r = to_log_returns(_series([100.0, 110.0]), 1)
    assert r.returns.tolist() == pytest.approx([math.log(1.1)], rel=1e-14)
    assert r.horizon_days == 1


def test_constant_prices():
    assert np.all(to_log_returns(_series([5.0] * 31), 10).returns == 0.0)


def test_return_count():
    r = to_log_returns(_series(_random_walk(2132)), 10)
    assert len(r.returns) == 213


@pytest.mark.parametrize("n,step", [(2132, 10), (101, 10), (57, 3), (11, 1)])
def test_partition_sum(n, step):
    p = _random_walk(n, seed=n)
    r = to_log_returns(_series(p), step)
    last = len(r.returns) * step
    assert math.fsum(r.returns) == pytest.approx(math.log(p[last] / p[0]), abs=1e-12)


def test_daily_blocks_match_ten_day():
    p = _random_walk(2132, seed=4)
    daily = to_log_returns(_series(p), 1).returns
    ten = to_log_returns(_series(p), 10).returns
    blocks = daily[: 10 * len(ten)].reshape(-1, 10).sum(axis=1)
    np.testing.assert_allclose(blocks, ten, atol=1e-12)


def test_too_few_prices():
    with pytest.raises(InsufficientDataError):
        to_log_returns(_series([1.0] * 10), 10)
    with pytest.raises(ValueError):
        to_log_returns(_series([1.0, 2.0]), 0)


def test_moments_small_sample():
    mean, sd, kurt = sample_moments(ReturnSeries(np.array([-1.0, 1.0]), 1))
    assert mean == 0.0
    assert sd == pytest.approx(math.sqrt(2), rel=1e-15)
    assert math.isnan(kurt)


def test_moments_gaussian_kurtosis():
    x = np.random.default_rng(9).standard_normal(10**5)
    mean, sd, kurt = sample_moments(ReturnSeries(x, 1))
    assert abs(kurt) < 3 * math.sqrt(24 / x.size)
    assert sd == pytest.approx(x.std(ddof=1))
    assert kurt == pytest.approx(stats.kurtosis(x, bias=False))


@pytest.mark.parametrize("values", [[0.01] * 10, [0.5]])
def test_moments_degenerate(values):
    with pytest.raises(InsufficientDataError):
        sample_moments(ReturnSeries(np.array(values), 1))
