"""Wellbeing model: diminishing-returns utility over goods and savings.

Both inputs run through the same saturating curve and the results multiply,
so an agent with nothing to consume or no financial cushion scores near zero
no matter how well off it is on the other axis. Savings are valued in days
of consumption at the prevailing price level, which makes wellbeing
invariant under a joint rescaling of all prices and all money.
"""

from __future__ import annotations

import math

from .core import MarketParams

__all__ = [
    "diminishing_returns_utility",
    "utility_from_goods",
    "utility_from_savings",
    "wellbeing",
]


def diminishing_returns_utility(x: float, scale: float) -> float:
    """u(x) = 1 - exp(-x/scale): zero at zero, saturating toward one.

    ``scale`` sets how quickly additional goods or cushion stop mattering;
    marginal utility falls by half every ``scale * ln 2`` units.
    """
    if not (scale > 0.0 and math.isfinite(scale)):
        raise ValueError(f"utility scale must be finite and positive, got {scale}")
    if not (x >= 0.0 and math.isfinite(x)):
        raise ValueError(f"utility argument must be finite and non-negative, got {x}")
    return 1.0 - math.exp(-(x / scale))


def utility_from_goods(consumable: float, params: MarketParams) -> float:
    """Utility of the purchased-goods inventory."""
    return diminishing_returns_utility(consumable, params.goods_utility_scale)


def utility_from_savings(savings: float, price_level: float, params: MarketParams) -> float:
    """Utility of a money cushion, measured in days it could sustain consumption.

    One day of consumption costs ``price_level * typical_goods_per_day``;
    savings divided by that cost is the argument fed to the saturating curve.
    """
    if not (price_level > 0.0 and math.isfinite(price_level)):
        raise ValueError(f"price level must be finite and positive, got {price_level}")
    cost_of_one_day = price_level * params.typical_goods_per_day
    return diminishing_returns_utility(savings / cost_of_one_day, params.savings_utility_scale)


def wellbeing(
    consumable: float, savings: float, price_level: float, params: MarketParams
) -> float:
    """Product of goods utility and savings utility, in [0, 1)."""
    return utility_from_goods(consumable, params) * utility_from_savings(
        savings, price_level, params
    )
