import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from labbubble import DegenerateMarketError, average_price_path, equilibrium_exists, speculative_asset, sweep_rd
from labbubble.homogeneous import imbalance_ratio, run_grid

# frozen from the recursion with kappa 4, alpha 0.85, phi 0.01, T 15
REF_PRICE = np.array([
    4.10078431372549, 4.45274358974359, 4.67962450411224, 4.801532680347256, 4.835484596476985,
    4.795876192719724, 4.694880728724046, 4.542786550449922, 4.348283822119721, 4.11870791546843,
    3.860245990443247, 3.578112317683212, 3.276697057332318, 2.95969249873247, 2.630200162384138,
])
REF_RD = 0.4897500705425794
EQ_HEAD = np.array([4.14, 4.563, 4.88655, 5.1255675])
EQ_RD = 0.8431732123071711


def test_reference_path_frozen(ref_asset):
    res = average_price_path(ref_asset, 15)
    assert np.allclose(res.path.price, REF_PRICE, rtol=0, atol=1e-12)
    assert res.path.rd == pytest.approx(REF_RD, abs=1e-12)


def test_first_period_by_hand(ref_asset):
    res = average_price_path(ref_asset, 15)
    q = 0.15 * 4 * 3.6 / 2 + 0.85 * 3.6
    assert res.quote[0] == pytest.approx(q, abs=1e-12)
    assert res.path.price[0] == pytest.approx(q + 0.49 / 0.51 - 1, abs=1e-12)
    assert res.path.bid[0] == pytest.approx(0.49 / 0.51 * q, abs=1e-12)
    assert res.path.ask[0] == pytest.approx(0.51 / 0.49 * q, abs=1e-12)


def test_equilibrium_path_frozen(ref_eq):
    res = average_price_path(ref_eq, 15)
    assert np.allclose(res.path.price[:4], EQ_HEAD, atol=1e-12)
    assert res.path.rd == pytest.approx(EQ_RD, abs=1e-12)
    assert res.in_equilibrium.all()
    assert np.array_equal(res.path.bid, res.path.ask)
    assert np.array_equal(res.path.price, res.quote)


def test_weak_foresight_breaks_equilibrium_every_period(ref_asset):
    res = average_price_path(ref_asset, 15)
    assert not res.in_equilibrium.any()
    assert np.all(res.path.bid < res.path.ask)


def test_price_feeds_next_quote(ref_asset):
    res = average_price_path(ref_asset, 15)
    fv = ref_asset.fundamental_values(15)
    expected = 0.15 * 4 * fv[1:] / 2 + 0.85 * res.path.price[:-1]
    assert np.allclose(res.quote[1:], expected, atol=1e-12)


def test_imbalance_ratio():
    assert imbalance_ratio(0.5) == 1.0
    assert imbalance_ratio(0.4) == pytest.approx(2 / 3)
    with pytest.raises(DegenerateMarketError):
        imbalance_ratio(0.0)
    with pytest.raises(DegenerateMarketError):
        imbalance_ratio(1.0)


def test_equilibrium_exists():
    assert equilibrium_exists(0.0, 5)
    assert not equilibrium_exists(0.01, 5)


def test_degenerate_buyer_probability_raises():
    # pi hits 0 at t = 5 for phi = 0.1, with a 5-period horizon the check is bypassed via buyer_prob
    a = speculative_asset(buyer_prob=0.0)
    with pytest.raises(DegenerateMarketError):
        average_price_path(a, 15)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 8.0), st.floats(0.05, 0.95), st.floats(0, 0.033))
def test_quote_bounded_by_confusion_scale(kappa, alpha, phi):
    # the mean quote is a convex combination of kappa*FV/2 and the last price
    a = speculative_asset(kappa=kappa, alpha=alpha, phi=phi)
    res = average_price_path(a, 15)
    fv = a.fundamental_values(15)
    prev = np.concatenate([[fv[0]], res.path.price[:-1]])
    lo = np.minimum(kappa * fv / 2, prev) - 1e-9
    hi = np.maximum(kappa * fv / 2, prev) + 1e-9
    assert np.all((lo <= res.quote) & (res.quote <= hi))


def test_sweep_rd_row_major_and_flags():
    surf = sweep_rd([3, 4], [0.85], [0.0, 0.01], T=15)
    keys = [(c.params["kappa"], c.params["phi"]) for c in surf.cells]
    assert keys == [(3, 0.0), (3, 0.01), (4, 0.0), (4, 0.01)]
    assert all(c.error is None for c in surf.cells)
    flagged = sweep_rd([4], [0.85], [0.05], T=15)
    assert flagged.cells[0].error is not None
    assert np.isnan(flagged.cells[0].rd_1)


def test_run_grid_is_order_independent():
    f = lambda x, y: (x * 10 + y, None)
    a = run_grid({"x": [1, 2], "y": [3, 4]}, f)
    b = run_grid({"x": [1, 2], "y": [3, 4]}, f)
    assert [c.rd_1 for c in a.cells] == [13, 14, 23, 24] == [c.rd_1 for c in b.cells]
