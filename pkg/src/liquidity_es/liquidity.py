"""Liquidity buckets, the Basel square-root aggregation and its elliptical correction.

Horizons are counted in base-horizon steps (``h = 1`` is the 10-day base
horizon, so FRTB's 10/20/40/60/120-day horizons are ``1, 2, 4, 6, 12``).
Each bucket ``k`` carries a weight vector ``b_k`` over the ``d`` risk factors;
the portfolio loss over the longest horizon decomposes as

    L = sum_k beta_k' X[h_{k-1}, h_k],      beta_k = b_k + ... + b_n,

so with ``w_k = beta_k' Omega beta_k`` the loss is spherical with

    phi_L(s) = prod_k phi_Y(s sqrt(w_k)) ** (h_k - h_{k-1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distributions import (
    CharacteristicGenerator,
    power_generator,
    product_generator,
    scale_generator,
)
from .fourier import DEFAULT_SETTINGS, InversionError, InversionSettings, expected_shortfall

__all__ = [
    "LiquiditySpec",
    "BucketLoads",
    "RiskReport",
    "StepError",
    "equicorrelation",
    "build_loads",
    "sd_of_loss",
    "loss_generator",
    "basel_aggregate",
    "generalized_aggregate",
    "scaling_ratio",
]


class StepError(RuntimeError):
    """An inversion failure inside the scaling-ratio pipeline, tagged with its step."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause


def equicorrelation(d: int, rho: float) -> np.ndarray:
    """``d x d`` correlation matrix with every off-diagonal entry equal to ``rho``."""
    d = int(d)
    if d < 1:
        raise ValueError("dimension must be positive")
    rho = float(rho)
    lower = -1.0 / (d - 1) if d > 1 else -math.inf
    if d > 1 and not lower < rho < 1.0:
        raise ValueError(f"rho={rho} outside ({lower:g}, 1) is not positive definite for d={d}")
    out = np.full((d, d), rho)
    np.fill_diagonal(out, 1.0)
    return out


@dataclass(frozen=True)
class LiquiditySpec:
    """Liquidity buckets over ``d`` risk factors.

    Parameters
    ----------
    horizons : sequence of int
        Strictly increasing ``h_1 < ... < h_n`` in base-horizon steps.
    weights : array_like, shape (n, d)
        Row ``k`` is ``b_k``.
    dispersion : array_like, shape (d, d)
        Symmetric positive-definite ``Omega``.
    buckets : sequence of sets of int, optional
        Risk-factor indices belonging to each bucket; when given, weights
        outside a bucket must be zero.
    """

    horizons: tuple
    weights: np.ndarray = field(repr=False)
    dispersion: np.ndarray = field(repr=False)
    buckets: tuple | None = None

    def __post_init__(self):
        h = tuple(int(x) for x in self.horizons)
        if any(x != y for x, y in zip(h, self.horizons)):
            raise ValueError("horizons must be integers")
        if not h or h[0] < 1 or any(b <= a for a, b in zip(h, h[1:])):
            raise ValueError(f"horizons must be positive and strictly increasing, got {h}")
        w = np.array(self.weights, dtype=float, ndmin=2)
        omega = np.array(self.dispersion, dtype=float, ndmin=2)
        n, d = w.shape
        if n != len(h):
            raise ValueError(f"{len(h)} horizons but {n} weight vectors")
        if omega.shape != (d, d):
            raise ValueError(f"dispersion must be {d}x{d}, got {omega.shape}")
        if not np.allclose(omega, omega.T, rtol=0, atol=1e-12):
            raise ValueError("dispersion must be symmetric")
        try:
            np.linalg.cholesky(omega)
        except np.linalg.LinAlgError:
            raise ValueError("dispersion must be positive definite") from None
        if self.buckets is not None:
            buckets = tuple(frozenset(int(i) for i in b) for b in self.buckets)
            if len(buckets) != n:
                raise ValueError("one bucket membership set per horizon is required")
            for k, members in enumerate(buckets):
                outside = [i for i in range(d) if i not in members and w[k, i] != 0.0]
                if outside:
                    raise ValueError(f"bucket {k + 1} has nonzero weight on factors {outside}")
            object.__setattr__(self, "buckets", buckets)
        w.setflags(write=False)
        omega.setflags(write=False)
        object.__setattr__(self, "horizons", h)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dispersion", omega)

    @classmethod
    def one_factor_per_bucket(cls, horizons: Sequence[int], rho: float = 0.0) -> "LiquiditySpec":
        """One risk factor per bucket with unit weight and equicorrelated dispersion."""
        n = len(horizons)
        return cls(tuple(horizons), np.eye(n), equicorrelation(n, rho),
                   buckets=tuple({k} for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.horizons)

    @property
    def increments(self) -> tuple:
        """``h_k - h_{k-1}`` with ``h_0 = 0``."""
        h = (0,) + self.horizons
        return tuple(b - a for a, b in zip(h, h[1:]))


@dataclass(frozen=True)
class BucketLoads:
    betas: np.ndarray
    quadforms: tuple


def build_loads(spec: LiquiditySpec) -> BucketLoads:
    """Cumulative weights ``beta_k = sum_{j >= k} b_j`` and ``w_k = beta_k' Omega beta_k``."""
    betas = np.cumsum(spec.weights[::-1], axis=0)[::-1].copy()
    if np.any(np.all(betas == 0.0, axis=1)):
        raise ValueError("degenerate bucket: some beta_k is identically zero")
    w = np.einsum("ki,ij,kj->k", betas, spec.dispersion, betas)
    betas.setflags(write=False)
    return BucketLoads(betas, tuple(float(x) for x in w))


def sd_of_loss(loads: BucketLoads, spec: LiquiditySpec, sd_y: float) -> float:
    """``sd(L) = sd(Y) * sqrt(sum_k (h_k - h_{k-1}) w_k)``."""
    total = math.fsum(dh * w for dh, w in zip(spec.increments, loads.quadforms))
    return float(sd_y) * math.sqrt(total)


def loss_generator(spec: LiquiditySpec, g: CharacteristicGenerator,
                   loads: BucketLoads | None = None) -> CharacteristicGenerator:
    """Characteristic generator of the aggregate loss ``L``."""
    loads = build_loads(spec) if loads is None else loads
    parts = [
        power_generator(scale_generator(g, w), dh)
        for dh, w in zip(spec.increments, loads.quadforms)
    ]
    return product_generator(parts)


def basel_aggregate(es_components: Sequence[float], horizons: Sequence[int]) -> float:
    """Square-root-of-time aggregation ``sqrt(sum_k (h_k - h_{k-1}) / h_1 * ES_k**2)``.

    Examples
    --------
    >>> round(basel_aggregate([1.0, 1.0], [1, 2]), 12) == round(math.sqrt(2), 12)
    True
    """
    es = [float(x) for x in es_components]
    h = [int(x) for x in horizons]
    if len(es) != len(h):
        raise ValueError(f"{len(es)} ES components for {len(h)} horizons")
    if not es:
        raise ValueError("need at least one bucket")
    if any(x < 0 for x in es):
        raise ValueError("ES components must be nonnegative")
    prev = [0] + h[:-1]
    return math.sqrt(math.fsum((hk - hp) / h[0] * e * e for hk, hp, e in zip(h, prev, es)))


def generalized_aggregate(es_components: Sequence[float], horizons: Sequence[int],
                          ratio: float) -> float:
    """Basel aggregate rescaled by ``r = c_{alpha, psi_L} / c_{alpha, psi_1}``; exact for elliptical laws."""
    return float(ratio) * basel_aggregate(es_components, horizons)


@dataclass(frozen=True)
class RiskReport:
    model: str
    alpha: float
    spec: str
    c_base: float
    c_agg: float
    ratio: float
    es_basel: float
    es_generalized: float
    es_components: tuple
    sd_loss: float

    @property
    def overstatement(self) -> float:
        """Relative excess of the Basel number over the exact aggregate, ``1/r - 1``."""
        return 1.0 / self.ratio - 1.0

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "alpha": self.alpha,
            "spec": self.spec,
            "c_base": self.c_base,
            "c_agg": self.c_agg,
            "ratio": self.ratio,
            "es_basel": self.es_basel,
            "es_generalized": self.es_generalized,
            "overstatement": self.overstatement,
            "es_components": list(self.es_components),
            "sd_loss": self.sd_loss,
        }


def _describe(spec: LiquiditySpec) -> str:
    omega = spec.dispersion
    d = omega.shape[0]
    off = omega[~np.eye(d, dtype=bool)]
    if d > 1 and np.allclose(np.diag(omega), 1.0) and np.allclose(off, off[0]):
        disp = f"rho={off[0]:g}"
    elif d == 1:
        disp = f"omega={omega[0, 0]:g}"
    else:
        disp = "custom Omega"
    return f"h={list(spec.horizons)}, {disp}"


def scaling_ratio(spec: LiquiditySpec, g: CharacteristicGenerator, alpha: float,
                  cfg: InversionSettings = DEFAULT_SETTINGS, *, es_base: float | None = None,
                  label: str | None = None) -> RiskReport:
    """Scaling ratio ``r_alpha`` and both aggregate ES figures for one bucket layout.

    Parameters
    ----------
    spec : LiquiditySpec
    g : CharacteristicGenerator
        Law of a single base-horizon risk-factor change ``Y``.
    alpha : float
        Confidence level in ``(0.5, 1)``.
    es_base : float, optional
        Precomputed ES of ``Z`` (the ``h_1``-step sum), to share across layouts.

    Raises
    ------
    StepError
        Wraps any inversion failure with the pipeline step (1 for ``ES(Z)``,
        4 for ``ES(L)``).
    """
    loads = build_loads(spec)
    h1 = spec.horizons[0]
    z = power_generator(g, h1)
    if es_base is None:
        try:
            es_base = expected_shortfall(z, alpha, cfg)
        except InversionError as exc:
            raise StepError(1, exc) from exc
    sd_z = math.sqrt(h1) * g.sd
    c_base = es_base / sd_z

    lg = loss_generator(spec, g, loads)
    try:
        es_loss = expected_shortfall(lg, alpha, cfg)
    except InversionError as exc:
        raise StepError(4, exc) from exc
    sd_l = sd_of_loss(loads, spec, g.sd)
    c_agg = es_loss / sd_l
    ratio = c_agg / c_base

    # ES(L^(k)) = sqrt(w_k) ES(Z) by homogeneity
    components = tuple(math.sqrt(w) * es_base for w in loads.quadforms)
    es_basel = basel_aggregate(components, spec.horizons)
    return RiskReport(
        model=label if label is not None else g.label,
        alpha=float(alpha),
        spec=_describe(spec),
        c_base=c_base,
        c_agg=c_agg,
        ratio=ratio,
        es_basel=es_basel,
        es_generalized=ratio * es_basel,
        es_components=components,
        sd_loss=sd_l,
    )
