"""Daily price series to non-overlapping multi-day log-returns.

Only data preparation lives here; fitting GH parameters to the returns is
left to dedicated estimation software.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "InsufficientDataError",
    "read_price_csv",
    "to_log_returns",
    "sample_moments",
]


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or len(prices) != len(self.dates):
            raise ValueError("dates and prices must be equal-length sequences")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise ValueError("prices must be positive and finite")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        prices.setflags(write=False)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", prices)


@dataclass(frozen=True)
class ReturnSeries:
    returns: np.ndarray
    horizon_days: int


def read_price_csv(path) -> PriceSeries:
    """Read a ``date,price`` CSV with ISO-8601 dates.

    Rows with a missing or unparsable price are rejected with their line number.
    """
    dates, prices = [], []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["date", "price"]:
            raise ValueError(f"{path}: expected header 'date,price', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2 or not row[1].strip():
                raise ValueError(f"{path}:{lineno}: missing price")
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad date {row[0]!r}") from None
            try:
                price = float(row[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad price {row[1]!r}") from None
            dates.append(date)
            prices.append(price)
    return PriceSeries(tuple(dates), np.array(prices))


def to_log_returns(series: PriceSeries, step: int) -> ReturnSeries:
    """Non-overlapping ``step``-observation log-returns anchored at the first price.

    Observations past the last complete block are dropped, so the result has
    ``(n_prices - 1) // step`` entries.
    """
    step = int(step)
    if step < 1:
        raise ValueError("step must be a positive integer")
    p = series.prices
    if len(p) < step + 1:
        raise InsufficientDataError(f"need at least {step + 1} prices, got {len(p)}")
    logp = np.log(p[::step])
    return ReturnSeries(np.diff(logp), step)


def sample_moments(r: ReturnSeries) -> tuple[float, float, float]:
    """Sample mean, unbiased standard deviation and bias-corrected excess kurtosis.

    The kurtosis estimator needs four observations; with two or three the
    third entry is ``nan``.
    """
    x = np.asarray(r.returns, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least 2 returns for sample moments")
    mean = float(x.mean())
    sd = float(x.std(ddof=1))
    # mean roundoff leaves a tiny nonzero sd for constant input
    if np.ptp(x) == 0.0 or not math.isfinite(sd):
        raise InsufficientDataError("zero variance: kurtosis undefined")
    if x.size < 4:
        return mean, sd, math.nan
    kurt = float(stats.kurtosis(x, fisher=True, bias=False))
    return mean, sd, kurt
