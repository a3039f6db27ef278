"""Density, distribution function, VaR and expected shortfall from a characteristic function.

For a law symmetric about the origin with integrable real characteristic
function ``phi``::

    f(y)               = 1/pi * int_0^inf cos(s y) phi(s) ds
    F(y)               = 1/2 + 1/pi * int_0^inf sin(s y) / s * phi(s) ds
    E[Y; a <= Y <= b]  = 1/pi * int_0^inf N(s; a, b) / s**2 * phi(s) ds

with ``N(s; a, b) = b s sin(b s) + cos(b s) - a s sin(a s) - cos(a s)``.
Expected shortfall is the ``b -> inf`` limit of the last integral with
``a = VaR``, divided by ``1 - alpha``.

Numerics
--------
The last integrand splits as ``piece(s, b) - piece(s, a)`` with
``piece(s, x) = (x s sin(x s) + cos(x s) - 1) / s**2``, which is even in ``x``
and bounded at ``s = 0`` (limit ``x**2 / 2``).  Each integral is cut at
``s_core ~ 1/sd``:

* ``[0, s_core]`` is covered by panels no wider than half an oscillation,
  each integrated by a 20-point Gauss-Legendre rule checked against a
  10-point rule and bisected where they disagree;
* ``[s_core, s_end]`` is written as sums of ``f(s) sin(x s)`` /
  ``f(s) cos(x s)`` terms and handed to QUADPACK's oscillatory-weight
  routines (QAWO on a finite range, QAWF when ``phi`` decays too slowly to
  truncate).

``phi`` is assumed non-increasing on ``[0, inf)`` (true for every normal
variance mixture and anything built from them by powers, scalings and
products), which makes ``phi`` its own envelope for the truncation point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .distributions import CharacteristicGenerator

__all__ = [
    "InversionSettings",
    "DEFAULT_SETTINGS",
    "InversionError",
    "QuadratureError",
    "BracketError",
    "ConvergenceError",
    "shortfall_integrand",
    "density",
    "cdf",
    "truncated_mean",
    "value_at_risk",
    "expected_shortfall",
]


class InversionError(RuntimeError):
    """Base class for failures of the Fourier inversion routines."""


class QuadratureError(InversionError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


class BracketError(InversionError):
    def __init__(self, message, bracket):
        super().__init__(f"{message}; last bracket {bracket}")
        self.bracket = bracket


class ConvergenceError(InversionError):
    def __init__(self, message, tail):
        super().__init__(f"{message}; last estimates {list(tail)}")
        self.tail = list(tail)


@dataclass(frozen=True)
class InversionSettings:
    """Tolerances and schedules for the inversion integrals.

    Tolerances expressed "in sd units" are multiplied by the standard
    deviation of the law being inverted, so results do not depend on the
    arbitrary scale of a generator.

    Attributes
    ----------
    eps_trunc : float
        Truncate the ``s`` integrals where the integrand envelope drops below this.
    quad_rel_tol, quad_abs_tol : float
        Relative and absolute (sd units) targets passed to every quadrature.
    b_initial, b_growth : float
        Upper limits ``b_m = b_initial * b_growth**m * max(1, |a|)`` for the ES limit.
    b_stop_tol : float
        Stop the ES limit once two successive changes in ``(1 - alpha) * ES``
        are below this (sd units).
    root_tol : float
        Absolute tolerance of the VaR root.
    max_iter : int
        Cap on ES limit steps and on VaR bracket expansions.
    max_quad_error : float
        Quadrature error estimate (sd units) above which a QuadratureError is raised.
    core_width : float
        The panel region is ``[0, core_width / sd]``.
    """

    eps_trunc: float = 1e-12
    quad_rel_tol: float = 1e-12
    quad_abs_tol: float = 1e-13
    b_initial: float = 4.0
    b_growth: float = 2.0
    b_stop_tol: float = 1e-7
    root_tol: float = 1e-12
    max_iter: int = 30
    max_quad_error: float = 1e-8
    core_width: float = 1.0

    def __post_init__(self):
        for name in ("eps_trunc", "quad_rel_tol", "quad_abs_tol", "b_initial",
                     "b_stop_tol", "root_tol", "max_quad_error", "core_width"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.b_growth > 1:
            raise ValueError("b_growth must exceed 1")
        if int(self.max_iter) < 2:
            raise ValueError("max_iter must be at least 2")


DEFAULT_SETTINGS = InversionSettings()

_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)
_TAYLOR_U = 2e-2
_MAX_BISECT = 40
_MAX_PANELS = 200_000
_ROUNDOFF = 64 * np.finfo(float).eps


# --------------------------------------------------------------------------
# integrands


def _piece(s, x):
    """``(x s sin(x s) + cos(x s) - 1) / s**2``, stable as ``x s -> 0``."""
    s = np.asarray(s, dtype=float)
    u = x * s
    out = np.empty(np.broadcast(s, u).shape)
    small = np.abs(u) < _TAYLOR_U
    us = u[small] ** 2
    # u sin u + cos u - 1 = u^2/2 - u^4/8 + u^6/144 - u^8/5760 + ...
    out[small] = x * x * (0.5 - us / 8 + us * us / 144 - us**3 / 5760)
    big = ~small
    ub, sb = u[big], s[big]
    out[big] = (ub * np.sin(ub) + np.cos(ub) - 1.0) / (sb * sb)
    return out


def shortfall_integrand(s, a, b):
    """Kernel ``(b s sin(b s) + cos(b s) - a s sin(a s) - cos(a s)) / s**2``.

    Evaluated through a series in ``x s`` near the removable singularity at
    ``s = 0``, where it tends to ``(b**2 - a**2) / 2``.
    """
    out = _piece(s, float(b)) - _piece(s, float(a))
    return float(out) if np.ndim(out) == 0 else out


def _sinc_kernel(s, y):
    # sin(s y) / s
    return y * np.sinc(np.asarray(s) * (y / np.pi))


# --------------------------------------------------------------------------
# quadrature


def _panel_quad(f, hi, width, abs_tol, rel_tol):
    """Adaptive composite Gauss-Legendre on ``[0, hi]`` with panels at most ``width`` wide.

    Returns ``(value, error_estimate)``.
    """
    n0 = max(8, int(math.ceil(hi / width)))
    edges = np.linspace(0.0, hi, n0 + 1)
    lo_e, hi_e = edges[:-1], edges[1:]
    x20, w20 = _GL20
    x10, w10 = _GL10

    def rule(lo, hi_):
        half = 0.5 * (hi_ - lo)
        mid = 0.5 * (hi_ + lo)
        f20 = f(mid[:, None] + half[:, None] * x20)
        v20 = (f20 * w20).sum(axis=1) * half
        v10 = (f(mid[:, None] + half[:, None] * x10) * w10).sum(axis=1) * half
        # error floor set by rounding in the panel sum itself
        noise = _ROUNDOFF * (np.abs(f20) * w20).sum(axis=1) * half
        return v20, np.abs(v20 - v10), noise

    vals, errs, noise = rule(lo_e, hi_e)
    scale = max(float(np.abs(vals).sum()), 1e-300)
    budget = max(abs_tol, rel_tol * scale)
    accepted, accepted_err = [], []
    for _ in range(_MAX_BISECT):
        ok = errs <= np.maximum(budget * (hi_e - lo_e) / hi, noise)
        if len(lo_e) > _MAX_PANELS:
            ok[:] = True
        accepted.extend(vals[ok].tolist())
        accepted_err.extend(errs[ok].tolist())
        if ok.all():
            break
        lo_e, hi_e = lo_e[~ok], hi_e[~ok]
        mid = 0.5 * (lo_e + hi_e)
        lo_e, hi_e = np.concatenate([lo_e, mid]), np.concatenate([mid, hi_e])
        vals, errs, noise = rule(lo_e, hi_e)
    else:
        accepted.extend(vals.tolist())
        accepted_err.extend(errs.tolist())
    return math.fsum(accepted), math.fsum(accepted_err)


def _oscillatory_quad(f, lo, hi, weight, freq, abs_tol, rel_tol):
    """``int_lo^hi f(s) w(freq s) ds`` for ``w`` in ``{sin, cos}``; ``hi`` may be ``inf``."""
    if freq == 0.0:
        if weight == "sin":
            return 0.0, 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, lo, hi, epsabs=abs_tol, epsrel=rel_tol, limit=500)
        return val, err
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if math.isinf(hi):
            val, err = integrate.quad(f, lo, np.inf, weight=weight, wvar=freq,
                                      epsabs=abs_tol, limlst=200, limit=500)
        else:
            val, err = integrate.quad(f, lo, hi, weight=weight, wvar=freq,
                                      epsabs=abs_tol, epsrel=rel_tol, limit=2000, maxp1=200)
    return val, err


def _truncation_point(g, start, envelope, eps):
    """Smallest doubling of ``start`` where ``envelope(s, phi(s)) < eps``; ``inf`` if none."""
    s = start
    for _ in range(60):
        if envelope(s, float(g.eval(np.asarray(s)))) < eps:
            return s
        s *= 2.0
    return math.inf


class _Inverter:
    """Per-generator integration driver; holds the scale-dependent cut points."""

    def __init__(self, g: CharacteristicGenerator, cfg: InversionSettings):
        if not (g.sd > 0 and math.isfinite(g.sd)):
            raise ValueError("generator needs a positive finite standard deviation")
        self.g = g
        self.cfg = cfg
        self.s_core = cfg.core_width / g.sd
        self.abs_tol = cfg.quad_abs_tol * g.sd
        self.max_err = cfg.max_quad_error * g.sd

    def _check(self, what, err):
        if not err <= self.max_err:
            raise QuadratureError(f"{what} did not converge", err)

    def _integrate(self, what, core_fn, freq, tail_terms, envelope):
        """``int_0^inf core_fn`` where the tail equals ``sum(c * int f(s) w(freq s))``."""
        cfg, phi = self.cfg, self.g.eval
        s_end = _truncation_point(self.g, self.s_core, envelope, cfg.eps_trunc)
        core_hi = min(self.s_core, s_end)
        width = min(math.pi / max(freq, 1e-300), core_hi / 8)
        val, err = _panel_quad(lambda s: core_fn(s) * phi(s), core_hi, width,
                               self.abs_tol, cfg.quad_rel_tol)
        parts = [val]
        if s_end > core_hi:
            for coef, weight, f in tail_terms:
                if coef == 0.0:
                    continue
                v, e = _oscillatory_quad(f, core_hi, s_end, weight, freq,
                                         self.abs_tol, cfg.quad_rel_tol)
                parts.append(coef * v)
                err += abs(coef) * e
        self._check(what, err)
        return math.fsum(parts)

    def density(self, y):
        y = abs(float(y))
        phi = self.g.eval
        return self._integrate(
            "density",
            lambda s: np.cos(s * y),
            y,
            [(1.0, "cos", lambda s: phi(np.asarray(s)))],
            lambda s, p: p,
        ) / math.pi

    def sine_part(self, y):
        """``int_0^inf sin(s y) / s phi(s) ds`` for ``y >= 0``."""
        if y == 0.0:
            return 0.0
        phi = self.g.eval
        return self._integrate(
            "distribution function",
            lambda s: _sinc_kernel(s, y),
            y,
            [(1.0, "sin", lambda s: phi(np.asarray(s)) / s)],
            lambda s, p: p / s,
        )

    def cdf(self, y):
        y = float(y)
        return 0.5 + math.copysign(self.sine_part(abs(y)), y) / math.pi

    def half_moment(self, x):
        """``pi * E[Y; 0 <= Y <= |x|]``, i.e. the integral of ``piece(s, x) phi(s)``."""
        x = abs(float(x))
        if x == 0.0:
            return 0.0
        cfg, phi = self.cfg, self.g.eval
        envelope = lambda s, p: p * (x / s + 2.0 / (s * s))
        s_end = _truncation_point(self.g, self.s_core, envelope, cfg.eps_trunc)
        core_hi = min(self.s_core, s_end)
        width = min(math.pi / x, core_hi / 8)
        val, err = _panel_quad(lambda s: _piece(s, x) * phi(s), core_hi, width,
                               self.abs_tol, cfg.quad_rel_tol)
        parts = [val]
        if s_end > core_hi:
            f1 = lambda s: phi(np.asarray(s)) / s
            f2 = lambda s: phi(np.asarray(s)) / (s * s)
            v1, e1 = _oscillatory_quad(f1, core_hi, s_end, "sin", x, self.abs_tol, cfg.quad_rel_tol)
            v2, e2 = _oscillatory_quad(f2, core_hi, s_end, "cos", x, self.abs_tol, cfg.quad_rel_tol)
            # monotone and non-oscillatory: QUADPACK's infinite-range map beats a long finite range
            v3, e3 = _oscillatory_quad(f2, core_hi, math.inf, "cos", 0.0, self.abs_tol, cfg.quad_rel_tol)
            parts += [x * v1, v2, -v3]
            err += x * e1 + e2 + e3
        self._check("truncated moment", err)
        return math.fsum(parts)


# --------------------------------------------------------------------------
# public operations


def density(g: CharacteristicGenerator, y: float, cfg: InversionSettings = DEFAULT_SETTINGS) -> float:
    """Density of the symmetric law ``g`` at ``y``.

    Raises
    ------
    QuadratureError
        If the achieved error estimate exceeds ``cfg.max_quad_error``.
    """
    return _Inverter(g, cfg).density(y)


def cdf(g: CharacteristicGenerator, y: float, cfg: InversionSettings = DEFAULT_SETTINGS) -> float:
    """Distribution function of ``g`` at ``y`` by Gil-Pelaez inversion."""
    return _Inverter(g, cfg).cdf(y)


def truncated_mean(g: CharacteristicGenerator, a: float, b: float,
                   cfg: InversionSettings = DEFAULT_SETTINGS) -> float:
    """Partial first moment ``E[Y; a <= Y <= b]`` for finite ``a < b``."""
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("truncation limits must be finite")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    inv = _Inverter(g, cfg)
    return (inv.half_moment(b) - inv.half_moment(a)) / math.pi


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0.5 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0.5, 1), got {alpha}")
    return alpha


def _var(inv: _Inverter, alpha):
    cfg = inv.cfg
    lo, hi = 0.0, 20.0 * inv.g.sd
    for _ in range(cfg.max_iter):
        if inv.cdf(hi) >= alpha:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketError(f"could not bracket the {alpha} quantile", (lo, hi))
    try:
        return optimize.brentq(lambda y: inv.cdf(y) - alpha, lo, hi,
                               xtol=cfg.root_tol, maxiter=200)
    except (ValueError, RuntimeError) as exc:
        raise BracketError(f"root search failed: {exc}", (lo, hi)) from exc


def value_at_risk(g: CharacteristicGenerator, alpha: float,
                  cfg: InversionSettings = DEFAULT_SETTINGS) -> float:
    """``alpha``-quantile of ``g`` for ``0.5 < alpha < 1`` by bracketed root search on the cdf."""
    return _var(_Inverter(g, cfg), _check_alpha(alpha))


def expected_shortfall(g: CharacteristicGenerator, alpha: float,
                       cfg: InversionSettings = DEFAULT_SETTINGS, *, var: float | None = None,
                       return_history: bool = False):
    """Expected shortfall of ``g`` at level ``alpha`` as the limit in the upper truncation point.

    ``E[Y; VaR <= Y <= b] / (1 - alpha)`` is evaluated on the schedule
    ``b_m = b_initial * b_growth**m * max(1, VaR)`` until two successive
    changes are below ``b_stop_tol * sd / (1 - alpha)``.

    Parameters
    ----------
    var : float, optional
        A precomputed VaR, to skip the root search.
    return_history : bool
        Also return the list of ``(b, estimate)`` pairs.

    Raises
    ------
    ConvergenceError
        If the limit has not settled after ``cfg.max_iter`` steps.
    """
    alpha = _check_alpha(alpha)
    inv = _Inverter(g, cfg)
    a = _var(inv, alpha) if var is None else float(var)
    base = inv.half_moment(a)
    denom = math.pi * (1.0 - alpha)
    tol = cfg.b_stop_tol * g.sd / (1.0 - alpha)
    history = []
    confirmed = 0
    for m in range(cfg.max_iter):
        b = cfg.b_initial * cfg.b_growth**m * max(1.0, abs(a))
        est = (inv.half_moment(b) - base) / denom
        if history and abs(est - history[-1][1]) < tol:
            confirmed += 1
        else:
            confirmed = 0
        history.append((b, est))
        if confirmed >= 2:
            return (est, history) if return_history else est
    raise ConvergenceError("expected shortfall limit did not settle",
                           [e for _, e in history[-3:]])
