"""Brute-force simulation of the liquidity-horizon loss, used to cross-check the Fourier engine.

Risk-factor changes are drawn from the normal variance mixture
``X_t = sqrt(W_t) A V_t`` with ``A A' = Omega``, one mixing variable ``W_t``
per time step shared by every coordinate, and the loss is accumulated
directly as ``L = sum_k b_k' X[0, h_k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .distributions import Family, GHParams
from .liquidity import LiquiditySpec

__all__ = [
    "MixtureSampler",
    "InsufficientTailError",
    "sample_w",
    "simulate_losses",
    "empirical_es",
    "estimate_loss_es",
]

_CHUNK = 50_000


class InsufficientTailError(ValueError):
    """Fewer than 100 observations beyond the empirical quantile."""


@dataclass(frozen=True)
class MixtureSampler:
    params: GHParams
    rng_seed: int = 0


def _draw_w(p: GHParams, count: int, rng: np.random.Generator) -> np.ndarray:
    fam = p.family
    if fam is Family.GAUSS:
        return np.ones(count)
    if fam is Family.STUDENT_T:
        # inverse gamma IG(nu/2, nu/2)
        half = p.nu / 2
        return 1.0 / rng.gamma(half, 1.0 / half, size=count)
    if fam is Family.VG:
        # Ga(lam, kappa/2) with kappa = 2
        return rng.gamma(p.lam, 2.0 / p.kappa, size=count)
    if p.lam == -0.5:
        # GIG(-1/2, chi, kappa) is inverse Gaussian with mean sqrt(chi/kappa) and shape chi
        return rng.wald(math.sqrt(p.chi / p.kappa), p.chi, size=count)
    # ratio-of-uniforms sampler for GIG(lam, chi, kappa) = sqrt(chi/kappa) * GIG(lam, b, b)
    b = math.sqrt(p.chi * p.kappa)
    return stats.geninvgauss.rvs(p.lam, b, scale=math.sqrt(p.chi / p.kappa),
                                 size=count, random_state=rng)


def sample_w(sampler: MixtureSampler, count: int) -> np.ndarray:
    """Draw ``count`` iid mixing variables; identical output for identical seeds."""
    count = int(count)
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(sampler.rng_seed)
    return _draw_w(sampler.params, count, rng)


def _step_loadings(spec: LiquiditySpec) -> np.ndarray:
    """Row ``t`` holds ``beta_k`` for the bucket interval containing step ``t + 1``."""
    betas = np.cumsum(spec.weights[::-1], axis=0)[::-1]
    rows = []
    for beta, dh in zip(betas, spec.increments):
        rows.extend([beta] * dh)
    return np.asarray(rows)


def simulate_losses(spec: LiquiditySpec, params: GHParams, paths: int, seed: int) -> np.ndarray:
    """Simulate ``paths`` iid copies of the aggregate loss ``L``.

    Work is split into fixed-size chunks, each with its own child stream of
    ``SeedSequence(seed)``, so results depend only on ``(seed, paths)``.
    """
    paths = int(paths)
    if paths < 1:
        raise ValueError("paths must be positive")
    chol = np.linalg.cholesky(spec.dispersion)
    # beta' A per step; V is standard normal in R^d
    loadings = _step_loadings(spec) @ chol
    steps, d = loadings.shape
    n_chunks = -(-paths // _CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    out = np.empty(paths)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        m = min(_CHUNK, paths - i * _CHUNK)
        w = _draw_w(params, m * steps, rng).reshape(m, steps)
        v = rng.standard_normal((m, steps, d))
        x = np.sqrt(w)[:, :, None] * v
        out[i * _CHUNK:i * _CHUNK + m] = np.einsum("mtd,td->m", x, loadings)
    return out


def empirical_es(losses: np.ndarray, alpha: float) -> tuple[float, float]:
    """Mean of the ``ceil((1 - alpha) N)`` largest losses and its asymptotic standard error.

    The standard error uses ``(var(L | L > q) + alpha (ES - q)**2) / (N (1 - alpha))``.
    """
    losses = np.asarray(losses, dtype=float)
    n = losses.size
    k = int(math.ceil((1.0 - alpha) * n - 1e-9))
    if k < 100:
        raise InsufficientTailError(f"only {k} tail observations at alpha={alpha} with N={n}")
    tail = np.partition(losses, n - k)[n - k:]
    q = float(tail.min())
    es = float(tail.mean())
    se = math.sqrt((tail.var(ddof=1) + alpha * (es - q) ** 2) / k)
    return es, se


def estimate_loss_es(spec: LiquiditySpec, params: GHParams, alpha: float, paths: int,
                     seed: int) -> tuple[float, float]:
    """Monte Carlo ES of the aggregate loss, returned as ``(estimate, standard_error)``."""
    if paths < 10_000:
        raise ValueError("use at least 10^4 paths")
    if not 0.5 < alpha < 1:
        raise ValueError("alpha must lie in (0.5, 1)")
    return empirical_es(simulate_losses(spec, params, paths, seed), alpha)
