# %% [markdown]
# # Characteristic generators of the symmetric GH sub-families
#
# Each law is a normal variance mixture Y = sqrt(W) V. The parameters below
# were fitted to two-weekly S&P 500 log-returns; only shape matters here
# because every quantity of interest is scale free.

# %%
import numpy as np

from liquidity_es import GHParams, make_generator, power_generator, product_generator, scale_generator

models = [
    GHParams.gauss(),
    GHParams.student_t(2.92),
    GHParams.vg(0.95),
    GHParams.hyp(0.11),
    GHParams.nig(0.49),
]
s = np.array([0.0, 0.5, 1.0, 2.0, 5.0])
for p in models:
    g = make_generator(p)
    print(f"{g.label:16s} sd={g.sd:7.4f}  phi(s)={np.round(g(s), 5)}")

# %% [markdown]
# Sums of iid copies multiply characteristic functions, and scaling by a
# constant rescales the argument. These are the building blocks of the
# aggregate loss.

# %%
nig = make_generator(GHParams.nig(0.49))
z2 = power_generator(nig, 2)
print("two-step sum  sd:", z2.sd, "=", np.sqrt(2) * nig.sd)
mixed = product_generator([scale_generator(nig, 3.0), nig])
print("sqrt(3) Y1 + Y2 sd:", mixed.sd, "=", 2 * nig.sd)
print("phi at 1.0:", mixed(1.0), "=", nig(np.sqrt(3.0)) * nig(1.0))
