# %% [markdown]
# # Bessel functions behind the GH characteristic functions
#
# The generalized hyperbolic generators are ratios of modified Bessel
# functions of the third kind. At large arguments K itself underflows, so the
# engine works with log K.

# %%
import math

import numpy as np

from liquidity_es.specfun import bessel_k, log_bessel_k, log_gamma

# half-integer orders have closed forms
x = 2.0
print("K_1/2(2)  =", bessel_k(0.5, x), " closed form:", math.sqrt(math.pi / (2 * x)) * math.exp(-x))

# %%
# K is even in its order and satisfies K_{v+1} = K_{v-1} + (2v/x) K_v
v = 1.3
print("symmetry  :", bessel_k(v, x), bessel_k(-v, x))
print("recurrence:", bessel_k(v + 1, x), bessel_k(v - 1, x) + 2 * v / x * bessel_k(v, x))

# %%
# far beyond the underflow point of K the logarithm is still accurate
for arg in (10.0, 700.0, 5000.0):
    print(f"x={arg:7.0f}  K={bessel_k(1.0, arg):.3e}  log K={log_bessel_k(1.0, arg):.6f}")

# %%
print("log Gamma(0.5) =", log_gamma(0.5), "=", 0.5 * math.log(math.pi))
print(np.round(bessel_k(0.0, np.array([0.1, 1.0, 10.0])), 8))
