"""Characteristic functions of symmetric generalized hyperbolic laws.

A symmetric univariate law is carried around as a :class:`CharacteristicGenerator`:
its (real, even) characteristic function ``phi(s)`` evaluated for ``s >= 0``
together with its standard deviation.  The elliptical generator ``psi`` is
implied by ``phi(s) = psi(s**2)``; working with ``phi`` directly keeps every
downstream formula free of repeated squaring.

All laws here are normal variance mixtures ``Y = sqrt(W) V`` with ``W``
generalized inverse Gaussian ``GIG(lam, chi, kappa)`` of density

    f(w) ∝ w**(lam - 1) * exp(-(chi / w + kappa * w) / 2),

so ``phi(s) = E exp(-s**2 W / 2)`` is positive and decreasing on ``[0, inf)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .specfun import bessel_k, log_bessel_k, log_gamma

__all__ = [
    "Family",
    "GHParams",
    "CharacteristicGenerator",
    "InvalidParameterError",
    "make_generator",
    "power_generator",
    "scale_generator",
    "product_generator",
    "gig_mean",
]


class InvalidParameterError(ValueError):
    """Raised when a parameter set lies outside its family's domain."""


class Family(str, enum.Enum):
    GAUSS = "gauss"
    STUDENT_T = "t"
    VG = "vg"
    NIG = "nig"
    HYP = "hyp"
    GIG = "gig"


@dataclass(frozen=True)
class GHParams:
    """Shape parameters of a symmetric GH law, fully resolved to ``(lam, chi, kappa)``.

    Use the named constructors (:meth:`student_t`, :meth:`nig`, ...) rather
    than the raw initializer; they fill the fixed parameters of each
    sub-family.  Scale parameters are fixed by convention (``chi = nu`` for t,
    ``kappa = 2`` for VG, ``chi = 1`` for NIG/Hyp) since only scale-free
    ratios are ever reported.
    """

    family: Family
    lam: float = 0.0
    chi: float = 0.0
    kappa: float = 0.0
    nu: float | None = None
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("lam", "chi", "kappa"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        fam = self.family
        if fam is Family.GAUSS:
            return
        if fam is Family.STUDENT_T:
            if self.nu is None or not self.nu > 2:
                raise InvalidParameterError("Student t needs nu > 2 for a finite variance")
            if not (self.lam == -self.nu / 2 and self.chi == self.nu and self.kappa == 0):
                raise InvalidParameterError("Student t requires lam=-nu/2, chi=nu, kappa=0")
            return
        if fam is Family.VG:
            if not (self.lam > 0 and self.chi == 0 and self.kappa == 2):
                raise InvalidParameterError("VG requires lam > 0, chi=0, kappa=2")
            return
        if fam is Family.NIG and self.lam != -0.5:
            raise InvalidParameterError("NIG fixes lam = -1/2")
        if fam is Family.HYP and self.lam != 1.0:
            raise InvalidParameterError("Hyp fixes lam = 1")
        # NIG, Hyp and the general mixture all need the interior chi > 0, kappa > 0;
        # the boundary cases are the t (kappa = 0) and VG (chi = 0) families.
        if not (self.chi > 0 and self.kappa > 0):
            raise InvalidParameterError(
                f"{fam.value} requires chi > 0 and kappa > 0, got chi={self.chi}, kappa={self.kappa}"
            )
        if fam in (Family.NIG, Family.HYP):
            theta = math.sqrt(self.chi * self.kappa)
            if self.theta is not None and not math.isclose(self.theta, theta, rel_tol=1e-12):
                raise InvalidParameterError("theta inconsistent with sqrt(chi * kappa)")
            object.__setattr__(self, "theta", theta)

    @classmethod
    def gauss(cls) -> "GHParams":
        return cls(Family.GAUSS)

    @classmethod
    def student_t(cls, nu: float) -> "GHParams":
        nu = float(nu)
        return cls(Family.STUDENT_T, lam=-nu / 2, chi=nu, kappa=0.0, nu=nu)

    @classmethod
    def vg(cls, lam: float) -> "GHParams":
        return cls(Family.VG, lam=lam, chi=0.0, kappa=2.0)

    @classmethod
    def nig(cls, theta: float) -> "GHParams":
        if not theta > 0:
            raise InvalidParameterError("NIG needs theta > 0")
        return cls(Family.NIG, lam=-0.5, chi=1.0, kappa=float(theta) ** 2, theta=float(theta))

    @classmethod
    def hyp(cls, theta: float) -> "GHParams":
        if not theta > 0:
            raise InvalidParameterError("Hyp needs theta > 0")
        return cls(Family.HYP, lam=1.0, chi=1.0, kappa=float(theta) ** 2, theta=float(theta))

    @classmethod
    def gig(cls, lam: float, chi: float, kappa: float) -> "GHParams":
        return cls(Family.GIG, lam=lam, chi=chi, kappa=kappa)

    @property
    def label(self) -> str:
        fam = self.family
        if fam is Family.GAUSS:
            return "Gauss"
        if fam is Family.STUDENT_T:
            return f"t(nu={self.nu:g})"
        if fam is Family.VG:
            return f"VG(lambda={self.lam:g})"
        if fam is Family.NIG:
            return f"NIG(theta={self.theta:g})"
        if fam is Family.HYP:
            return f"Hyp(theta={self.theta:g})"
        return f"GH(lambda={self.lam:g}, chi={self.chi:g}, kappa={self.kappa:g})"


@dataclass(frozen=True)
class CharacteristicGenerator:
    """Characteristic function ``phi`` of a symmetric law plus its standard deviation.

    ``eval`` must accept a scalar or array of ``s >= 0`` and return values of
    the same shape.  The law is symmetric, so ``phi(-s) = phi(s)``; calling
    the generator directly applies ``abs`` first.
    """

    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    sd: float
    label: str = ""

    def __call__(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        out = self.eval(s)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def variance(self) -> float:
        return self.sd**2


def gig_mean(lam: float, chi: float, kappa: float) -> float:
    """Mean of ``GIG(lam, chi, kappa)`` for ``chi, kappa > 0``; this is ``var(Y)``."""
    x = math.sqrt(chi * kappa)
    return math.sqrt(chi / kappa) * math.exp(log_bessel_k(lam + 1, x) - log_bessel_k(lam, x))


def _gauss_phi(s):
    return np.exp(-0.5 * np.asarray(s, dtype=float) ** 2)


def _student_t_phi(nu):
    half = nu / 2
    log_norm = (half - 1) * math.log(2.0) + log_gamma(half)
    root_nu = math.sqrt(nu)
    variance = nu / (nu - 2)

    def phi(s):
        s = np.asarray(s, dtype=float)
        shape = s.shape
        s = s.reshape(-1)
        x = root_nu * s
        out = np.empty_like(x)
        # x**(nu/2) K_{nu/2}(x) overflows in its factors near 0; the
        # s**nu correction is far below double precision there.
        small = x < 1e-8
        out[small] = 1.0 - 0.5 * variance * s[small] ** 2
        big = ~small
        xb = x[big]
        if xb.size:
            out[big] = np.exp(half * np.log(xb) + log_bessel_k(half, xb) - log_norm)
        return out.reshape(shape)

    return phi


def _vg_phi(lam):
    def phi(s):
        s = np.asarray(s, dtype=float)
        return np.exp(-lam * np.log1p(0.5 * s * s))

    return phi


def _nig_phi(theta):
    # K_{1/2}(x) = sqrt(pi / 2x) exp(-x) collapses the Bessel ratio.
    def phi(s):
        s = np.asarray(s, dtype=float)
        return np.exp(theta - np.hypot(theta, s))

    return phi


def _gig_phi(lam, chi, kappa):
    log_k0 = log_bessel_k(lam, math.sqrt(chi * kappa))

    def phi(s):
        s = np.asarray(s, dtype=float)
        s2k = s * s + kappa
        return np.exp(
            0.5 * lam * (math.log(kappa) - np.log(s2k))
            + log_bessel_k(lam, np.sqrt(chi * s2k))
            - log_k0
        )

    return phi


def make_generator(p: GHParams) -> CharacteristicGenerator:
    """Build the characteristic generator of the symmetric GH law ``p``.

    Examples
    --------
    >>> g = make_generator(GHParams.vg(1.0))
    >>> round(g(math.sqrt(2)), 12)
    0.5
    """
    fam = p.family
    if fam is Family.GAUSS:
        return CharacteristicGenerator(_gauss_phi, 1.0, p.label)
    if fam is Family.STUDENT_T:
        return CharacteristicGenerator(_student_t_phi(p.nu), math.sqrt(p.nu / (p.nu - 2)), p.label)
    if fam is Family.VG:
        return CharacteristicGenerator(_vg_phi(p.lam), math.sqrt(p.lam), p.label)
    if fam is Family.NIG:
        theta = p.theta
        # chi = 1 convention: var(Y) = 1 / theta
        return CharacteristicGenerator(_nig_phi(theta), math.sqrt(1.0 / theta), p.label)
    if fam is Family.HYP:
        theta = p.theta
        var = bessel_k(2, theta) / bessel_k(1, theta) / theta
        return CharacteristicGenerator(_gig_phi(1.0, 1.0, theta * theta), math.sqrt(var), p.label)
    return CharacteristicGenerator(
        _gig_phi(p.lam, p.chi, p.kappa), math.sqrt(gig_mean(p.lam, p.chi, p.kappa)), p.label
    )


def power_generator(g: CharacteristicGenerator, m: int) -> CharacteristicGenerator:
    """Law of the sum of ``m`` iid copies: ``phi**m`` with ``sd * sqrt(m)``."""
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"power must be a positive integer, got {m!r}")
    m = int(m)
    if m == 1:
        return g
    base = g.eval
    return CharacteristicGenerator(
        lambda s: base(s) ** m, g.sd * math.sqrt(m), f"{g.label}^{m}"
    )


def scale_generator(g: CharacteristicGenerator, c: float) -> CharacteristicGenerator:
    """Law of ``sqrt(c) * Y``: ``phi(s sqrt(c))`` with ``sd * sqrt(c)``.

    ``c`` plays the role of a scalar dispersion, matching ``E_1(0, c, psi)``.
    """
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise ValueError(f"scale must be positive and finite, got {c}")
    if c == 1.0:
        return g
    root = math.sqrt(c)
    base = g.eval
    return CharacteristicGenerator(
        lambda s: base(np.asarray(s, dtype=float) * root), g.sd * root, f"{g.label}*{c:g}"
    )


def product_generator(gs: Sequence[CharacteristicGenerator]) -> CharacteristicGenerator:
    """Law of a sum of independent symmetric variables: pointwise product of ``phi``."""
    gs = list(gs)
    if not gs:
        raise ValueError("product_generator needs at least one generator")
    if len(gs) == 1:
        return gs[0]
    evals = [g.eval for g in gs]

    def phi(s):
        out = evals[0](s)
        for f in evals[1:]:
            out = out * f(s)
        return out

    sd = math.sqrt(math.fsum(g.sd**2 for g in gs))
    return CharacteristicGenerator(phi, sd, " * ".join(g.label for g in gs))
