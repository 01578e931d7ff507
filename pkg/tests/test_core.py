import numpy as np
import pytest
from hypothesis import given, strategies as st

from labbubble import (
    AssetSpec,
    DomainError,
    MarketSpec,
    PricePath,
    buyer_probability,
    endowment_bound,
    fundamental_value,
    noise_quote_mean,
    rd_measure,
    speculative_asset,
    value_asset,
)
from labbubble.core import HOLDING_COST_DIVIDENDS, SPECULATIVE_DIVIDENDS


def test_mean_dividends():
    assert speculative_asset().mean_dividend == pytest.approx(0.12, abs=1e-15)
    assert value_asset().mean_dividend == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("t, expected", [(1, 3.60), (8, 2.76), (15, 1.92)])
def test_fundamental_value_speculative(t, expected):
    assert fundamental_value(speculative_asset(), t, 15) == pytest.approx(expected, abs=1e-12)


def test_fundamental_value_holding_cost_is_flat():
    fv = value_asset().fundamental_values(15)
    assert np.allclose(fv, 2.8, atol=1e-12)


def test_fundamental_value_rejects_bad_period():
    with pytest.raises(DomainError):
        fundamental_value(speculative_asset(), 0, 15)
    with pytest.raises(DomainError):
        fundamental_value(speculative_asset(), 16, 15)


def test_fv_path_declines_by_mean_dividend():
    fv = speculative_asset().fundamental_values(15, extra=1)
    assert np.allclose(np.diff(fv), -0.12, atol=1e-12)
    assert fv[-1] == pytest.approx(1.8)


def test_buyer_probability_examples():
    assert buyer_probability(0.0, 7) == 0.5
    assert buyer_probability(0.01, 1) == pytest.approx(0.49)
    assert buyer_probability(0.01, 15) == pytest.approx(0.35)
    assert buyer_probability(0.1, 6) == 0.0


@given(st.floats(0, 0.5 / 15, exclude_max=True), st.integers(1, 15))
def test_buyer_probability_in_open_interval_on_horizon(phi, t):
    pi = buyer_probability(phi, t)
    assert 0 < pi <= 0.5


def test_phi_horizon_constraint():
    speculative_asset(phi=0.0333).check_horizon(15)
    with pytest.raises(DomainError, match=r"0\.5/T"):
        speculative_asset(phi=0.05).check_horizon(15)


@pytest.mark.parametrize("kw", [dict(alpha=1.0), dict(alpha=0.0), dict(kappa=0.0), dict(phi=-0.1),
                                dict(buyer_prob=1.5)])
def test_asset_domain(kw):
    with pytest.raises(DomainError):
        speculative_asset(**kw)


def test_noise_quote_first_period():
    # (1 - 0.85) * 4 * 3.6 / 2 + 0.85 * 3.6
    assert noise_quote_mean(speculative_asset(), 3.6, 3.6) == pytest.approx(4.14, abs=1e-12)


@given(st.floats(0.5, 10), st.floats(0.01, 0.99), st.floats(0.1, 10), st.floats(0.1, 10))
def test_noise_quote_is_convex_combination(kappa, alpha, fv, prev):
    a = speculative_asset(kappa=kappa, alpha=alpha)
    q = noise_quote_mean(a, fv, prev)
    lo, hi = sorted((kappa * fv / 2, prev))
    assert lo - 1e-9 <= q <= hi + 1e-9


def test_endowment_bound():
    # kappa * FV_1 * T
    assert endowment_bound(speculative_asset(), 15) == pytest.approx(4 * 3.6 * 15)
    with pytest.raises(DomainError):
        endowment_bound(speculative_asset(kappa=0.9), 15)


def test_rd_measure_at_fundamental_is_zero():
    fv = speculative_asset().fundamental_values(15)
    rd_t, rd = rd_measure(fv, fv)
    assert np.all(rd_t == 0) and rd == 0


def test_rd_measure_value():
    rd_t, rd = rd_measure([2.0, 4.0], [2.0, 2.0])
    assert np.allclose(rd_t, [0.0, 1.0])
    assert rd == pytest.approx(0.5)


@given(st.lists(st.floats(0.1, 20), min_size=2, max_size=20), st.floats(0.01, 100))
def test_rd_scale_invariance(prices, c):
    fv = np.linspace(3.6, 1.92, len(prices))
    _, rd = rd_measure(prices, fv)
    _, rd_scaled = rd_measure(np.array(prices) * c, fv * c)
    assert rd_scaled == pytest.approx(rd, rel=1e-9, abs=1e-12)


def test_rd_measure_shape_mismatch():
    with pytest.raises(DomainError):
        rd_measure([1.0, 2.0], [1.0])


def test_price_path_computes_rd():
    fv = np.array([2.0, 2.0])
    p = PricePath(fv=fv, price=np.array([2.0, 3.0]), bid=fv, ask=fv, imbalance=np.zeros(2))
    assert p.T == 2 and list(p.t) == [1, 2]
    assert p.rd == pytest.approx(0.25)


def test_market_spec_initial_price():
    m = MarketSpec(15, (speculative_asset(), value_asset()))
    assert m.initial_price(0) == pytest.approx(3.6)
    assert m.initial_price(1) == pytest.approx(2.8)


def test_dividend_supports():
    assert SPECULATIVE_DIVIDENDS == (0.0, 0.10, 0.16, 0.22)
    assert HOLDING_COST_DIVIDENDS == (-0.2, -0.1, 0.0, 0.1, 0.2)
    assert AssetSpec().terminal_value == 1.8
