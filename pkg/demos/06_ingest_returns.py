# %% [markdown]
# # From daily prices to two-weekly log-returns
#
# A synthetic price file stands in for real index data. Returns are taken
# over non-overlapping blocks of ten observations.

# %%
import datetime as dt
import tempfile
from pathlib import Path

import numpy as np

from liquidity_es.ingest import read_price_csv, sample_moments, to_log_returns

rng = np.random.default_rng(2007)
daily = rng.standard_t(4, size=2131) * 0.008
prices = 1500 * np.exp(np.concatenate([[0.0], np.cumsum(daily)]))
start = dt.date(2007, 7, 17)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "index.csv"
    rows = [f"{start + dt.timedelta(days=i)},{p:.4f}" for i, p in enumerate(prices)]
    path.write_text("date,price\n" + "\n".join(rows) + "\n")
    series = read_price_csv(path)

returns = to_log_returns(series, 10)
mean, sd, kurt = sample_moments(returns)
print(f"{len(series.prices)} prices -> {len(returns.returns)} ten-day returns")
print(f"mean {mean:.5f}  sd {sd:.5f}  excess kurtosis {kurt:.3f}")
