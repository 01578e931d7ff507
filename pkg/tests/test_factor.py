import numpy as np
import pytest
from hypothesis import given, strategies as st

from labbubble import (
    DomainError,
    FactorPopulation,
    average_price_path,
    check_equilibrium_conditions,
    factor_price_paths,
    factor_rd_surface,
    speculative_asset,
    value_asset,
)
from labbubble.factor import asset2_demand_supply, asset2_imbalance, asset2_prevailing

populations = st.tuples(st.integers(1, 80), st.integers(0, 60), st.integers(0, 60)).map(
    lambda c: FactorPopulation(*c))


def test_population_counts():
    pop = FactorPopulation(50, 45, 5)
    assert pop.N == 100
    assert FactorPopulation.from_shares(100, 50, 25, 25) == FactorPopulation(50, 25, 25)
    with pytest.raises(DomainError):
        FactorPopulation.from_shares(3, 50, 25, 25)
    with pytest.raises(DomainError):
        FactorPopulation(-1, 5, 5)


def test_imbalance_by_hand():
    # J = (50, 45, 5), pi1 = 0.4: demand 25 + 18 + 3 = 46, supply 25 + 27 + 2 = 54
    pop = FactorPopulation(50, 45, 5)
    assert asset2_demand_supply(pop, 0.4) == pytest.approx((46, 54))
    assert asset2_imbalance(pop, 0.4) == pytest.approx(46 / 54 - 1, abs=1e-15)


@given(populations, st.floats(0.01, 0.99))
def test_demand_plus_supply_is_population(pop, pi1):
    d, s = asset2_demand_supply(pop, pi1)
    assert d + s == pytest.approx(pop.N)


@given(populations, st.floats(0.01, 0.99))
def test_swapping_factors_mirrors_buyer_probability(pop, pi1):
    # swapping J_D and J_MN is the same as flipping pi1
    swapped = FactorPopulation(pop.j_noise, pop.j_market_neutral, pop.j_directional)
    assert asset2_imbalance(swapped, pi1) == pytest.approx(asset2_imbalance(pop, 1 - pi1), abs=1e-12)


@given(populations, st.floats(0.01, 0.99), st.floats(0.5, 5))
def test_prevailing_matches_quote_value_over_counts(pop, pi1, q2):
    d, s = asset2_demand_supply(pop, pi1)
    bid, ask = asset2_prevailing(pop, pi1, 0.5, q2)
    assert bid == pytest.approx(d * q2 / s, rel=1e-12)
    assert ask == pytest.approx(s * q2 / d, rel=1e-12)


@given(populations, st.floats(0.01, 0.99))
def test_equilibrium_condition_matches_bid_equals_ask(pop, pi1):
    bid, ask = asset2_prevailing(pop, pi1, 0.5, 2.8)
    eq = check_equilibrium_conditions(pop, pi1, 0.5)["asset2"]
    assert eq == (bid == ask)


def test_equal_factors_give_flat_asset2(ref_asset, holding_cost):
    res = factor_price_paths(ref_asset, holding_cost, FactorPopulation(50, 25, 25), 15)
    assert np.all(res.path_2.price == 2.8)
    assert res.path_2.rd == 0.0
    assert res.equilibrium_2.all()


def test_asset1_unaffected_by_factor_mix(ref_asset, holding_cost):
    hom = average_price_path(ref_asset, 15)
    for jd, jm in [(45, 5), (5, 45), (25, 25), (0, 50)]:
        res = factor_price_paths(ref_asset, holding_cost, FactorPopulation(50, jd, jm), 15)
        assert np.array_equal(res.path_1.price, hom.path.price)


def test_misvaluation_signs(ref_asset, holding_cost):
    # with pi1 < 1/2 directional traders mostly sell asset 2, market-neutral ones mostly buy
    under = factor_price_paths(ref_asset, holding_cost, FactorPopulation(50, 45, 5), 15)
    over = factor_price_paths(ref_asset, holding_cost, FactorPopulation(50, 5, 45), 15)
    assert under.path_2.rd == pytest.approx(-0.1526650836559669, abs=1e-12)
    assert over.path_2.rd == pytest.approx(0.17587055375454966, abs=1e-12)
    assert np.all(under.path_2.price < 2.8) and np.all(over.path_2.price > 2.8)


def test_rd_surface_balanced_column_is_zero(holding_cost):
    surf = factor_rd_surface(speculative_asset(), holding_cost, 15, [0.3, 0.5, 0.7], [0, 10, 25, 40, 50])
    for c in surf.cells:
        if c.params["pi1"] == 0.5 or c.params["j_mn"] == 25:
            assert abs(c.rd_2) < 1e-12
    assert len(surf.cells) == 15


def test_rd_surface_flags_infeasible_cells(holding_cost):
    surf = factor_rd_surface(speculative_asset(), holding_cost, 15, [0.4], [60])
    assert surf.cells[0].error is not None
