"""The wellbeing function and its component curves."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agora import MarketParams
from agora.utility import (
    diminishing_returns_utility,
    utility_from_goods,
    utility_from_savings,
    wellbeing,
)

PARAMS = MarketParams()  # goods scale 5.0, savings scale 10.0


def test_zero_input_gives_zero_utility():
    for scale in (0.5, 1.0, 5.0, 100.0):
        assert diminishing_returns_utility(0.0, scale) == 0.0


def test_value_at_the_scale_point():
    assert diminishing_returns_utility(5.0, 5.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-15)


def test_concavity_equal_steps_shrink():
    # doubling from a to 2a gains less than the first step from 0 to a
    for i in range(100):
        a = 0.1 + i * 0.5
        first = diminishing_returns_utility(a, 5.0) - 0.0
        second = diminishing_returns_utility(2 * a, 5.0) - diminishing_returns_utility(a, 5.0)
        assert second < first


def test_goods_utility_monotone():
    values = [utility_from_goods(float(g), PARAMS) for g in range(60)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_domain_errors():
    with pytest.raises(ValueError):
        diminishing_returns_utility(-0.1, 5.0)
    with pytest.raises(ValueError):
        diminishing_returns_utility(1.0, 0.0)
    with pytest.raises(ValueError):
        diminishing_returns_utility(float("nan"), 5.0)
    with pytest.raises(ValueError):
        utility_from_savings(10.0, 0.0, PARAMS)
    with pytest.raises(ValueError):
        utility_from_savings(10.0, -2.0, PARAMS)


def test_savings_valued_in_days_of_consumption():
    # 200 money at price 2 with a 10-unit daily bundle buys 10 days
    params = MarketParams(typical_goods_per_day=10.0)
    expected = diminishing_returns_utility(10.0, params.savings_utility_scale)
    assert utility_from_savings(200.0, 2.0, params) == expected


def test_wellbeing_zero_factor_dominates():
    assert wellbeing(0.0, 500.0, 1.0, PARAMS) == 0.0
    assert wellbeing(500.0, 0.0, 1.0, PARAMS) == 0.0


def test_wellbeing_product_at_both_scale_points():
    # consumable at the goods scale and savings worth savings_scale days
    savings = 1.0 * PARAMS.typical_goods_per_day * PARAMS.savings_utility_scale
    value = wellbeing(PARAMS.goods_utility_scale, savings, 1.0, PARAMS)
    assert value == pytest.approx((1.0 - math.exp(-1.0)) ** 2, rel=1e-15)


def test_output_stays_in_unit_interval():
    # Note: at extreme arguments (hundreds of scale lengths) the curve
    # saturates to exactly 1.0 in double precision, so the strict upper
    # bound is asserted on a realistic grid.
    for c in (0.0, 0.5, 5.0, 50.0, 150.0):
        for s in (0.0, 1.0, 100.0, 5000.0):
            for level in (0.1, 1.0, 9.7, 50.0):
                w = wellbeing(c, s, level, PARAMS)
                assert 0.0 <= w < 1.0


def test_strictly_increasing_in_each_argument():
    # keep savings below the float saturation point of the exponential so
    # the inequality stays strict
    for c in (0.5, 3.0, 12.0):
        for s in (2.0, 40.0, 250.0):
            assert wellbeing(c + 1.0, s, 2.0, PARAMS) > wellbeing(c, s, 2.0, PARAMS)
            assert wellbeing(c, s * 1.1, 2.0, PARAMS) > wellbeing(c, s, 2.0, PARAMS)


@settings(deadline=None)
@given(
    consumable=st.floats(0.0, 60.0),
    savings=st.floats(0.0, 1e5),
    price_level=st.floats(1e-3, 1e3),
    factor=st.floats(0.01, 100.0),
)
def test_invariant_under_joint_scaling(consumable, savings, price_level, factor):
    base = wellbeing(consumable, savings, price_level, PARAMS)
    scaled = wellbeing(consumable, savings * factor, price_level * factor, PARAMS)
    assert abs(base - scaled) <= 1e-12 * max(base, scaled)
