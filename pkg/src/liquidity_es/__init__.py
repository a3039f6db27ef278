"""Liquidity-adjusted expected shortfall for elliptical risk factors.

The Basel liquidity-horizon formula aggregates square-root-of-time scaled ES
components; for spherical laws the exact aggregate differs by the factor
``r = c(L) / c(Z)`` where ``c = ES / sd``. The engine evaluates ``c`` by
inverting the characteristic function of a symmetric generalized hyperbolic
law, and cross-checks against simulation.
"""

from .distributions import (
    CharacteristicGenerator,
    Family,
    GHParams,
    InvalidParameterError,
    make_generator,
    power_generator,
    product_generator,
    scale_generator,
)
from .fourier import (
    DEFAULT_SETTINGS,
    InversionError,
    InversionSettings,
    cdf,
    density,
    expected_shortfall,
    truncated_mean,
    value_at_risk,
)
from .liquidity import (
    LiquiditySpec,
    RiskReport,
    basel_aggregate,
    equicorrelation,
    generalized_aggregate,
    loss_generator,
    scaling_ratio,
)

__all__ = [
    "CharacteristicGenerator",
    "Family",
    "GHParams",
    "InvalidParameterError",
    "make_generator",
    "power_generator",
    "product_generator",
    "scale_generator",
    "DEFAULT_SETTINGS",
    "InversionError",
    "InversionSettings",
    "cdf",
    "density",
    "expected_shortfall",
    "truncated_mean",
    "value_at_risk",
    "LiquiditySpec",
    "RiskReport",
    "basel_aggregate",
    "equicorrelation",
    "generalized_aggregate",
    "loss_generator",
    "scaling_ratio",
]
