# %% [markdown]
# # The full experiment grid
#
# Five models, three confidence levels and two bucket layouts, each with
# rho in {0, 0.5}. The same run is available as `liquidity-es run --paper`.

# %%
import time

from liquidity_es import experiments

start = time.perf_counter()
run = experiments.run_tables(experiments.reference_config())
print(experiments.render_tables(run))
print(f"{len(run.cells)} cells in {time.perf_counter() - start:.1f}s, all ok: {run.ok}")
