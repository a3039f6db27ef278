# %% [markdown]
# # Density, cdf, VaR and ES from the characteristic function
#
# Nothing here uses a closed-form density: everything is recovered by
# inverting phi. The Student t law is used because its ES is known exactly.

# %%
from scipy import stats

from liquidity_es import GHParams, cdf, density, expected_shortfall, make_generator, value_at_risk

nu = 2.92
g = make_generator(GHParams.student_t(nu))
for y in (0.0, 1.0, 3.0):
    print(f"y={y}: density {density(g, y):.10f} (exact {stats.t.pdf(y, nu):.10f}), "
          f"cdf {cdf(g, y):.10f} (exact {stats.t.cdf(y, nu):.10f})")

# %%
for alpha in (0.95, 0.975, 0.99):
    q = value_at_risk(g, alpha)
    es = expected_shortfall(g, alpha)
    qt = stats.t.ppf(alpha, nu)
    exact = stats.t.pdf(qt, nu) / (1 - alpha) * (nu + qt**2) / (nu - 1)
    print(f"alpha={alpha}: VaR {q:.8f} vs {qt:.8f}   ES {es:.8f} vs {exact:.8f}")

# %% [markdown]
# ES is the limit of a truncated tail mean as the upper cut-off grows; the
# history shows how that limit settles.

# %%
es, history = expected_shortfall(make_generator(GHParams.nig(0.49)), 0.975, return_history=True)
for b, est in history:
    print(f"b={b:10.2f}  ES estimate {est:.10f}")
