"""Noise traders mixed with fundamentalists and speculators.

Each period the two strategic groups pick a side from their beliefs, which
selects one of four events. Prevailing prices follow from the event's
buyer and seller counts, and the recorded price is the bid/ask mid. The
mid also anchors next period's noise quote.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .core import (
    AssetSpec,
    ConfigurationError,
    DegenerateMarketError,
    DomainError,
    EventLabel,
    PricePath,
    noise_quote_mean,
)
from .factor import TwoAssetResult
from .homogeneous import Surface, run_grid

# (fundamentalists buy, speculators buy)
EVENT_SIDES = {
    EventLabel.E1: (True, False),
    EventLabel.E2: (True, True),
    EventLabel.E3: (False, False),
    EventLabel.E4: (False, True),
}
SIDES_EVENT = {v: k for k, v in EVENT_SIDES.items()}

# relative tolerance for calling bid and ask equal
EQ_RTOL = 1e-12


@dataclass(frozen=True)
class StrategyParams:
    alpha_f: float = 0.25
    gamma1: float = 0.10
    gamma2: float = 4.0

    def __post_init__(self):
        if not 0 < self.alpha_f <= 1:
            raise DomainError(f"alpha_f must lie in (0, 1], got {self.alpha_f}")
        if not 0 <= self.gamma1 <= 1:
            raise DomainError(f"gamma1 must lie in [0, 1], got {self.gamma1}")
        if not self.gamma2 >= 0:
            raise DomainError(f"gamma2 must be >= 0, got {self.gamma2}")

    @property
    def is_limit_case(self) -> bool:
        return self.alpha_f == 1 and self.gamma1 == 0


@dataclass(frozen=True)
class HeteroPopulation:
    j_noise: int
    j_fund: int
    j_spec: int

    def __post_init__(self):
        counts = (self.j_noise, self.j_fund, self.j_spec)
        if any(int(c) != c or c < 0 for c in counts):
            raise DomainError(f"trader counts must be nonnegative integers, got {counts}")
        if sum(counts) == 0:
            raise DomainError("population is empty")

    @property
    def N(self) -> int:
        return self.j_noise + self.j_fund + self.j_spec

    @property
    def noise_dominant(self) -> bool:
        return self.j_noise >= self.j_fund + self.j_spec

    @classmethod
    def balanced(cls, N: int, j_noise: int) -> "HeteroPopulation":
        """Equal numbers of fundamentalists and speculators filling ``N - j_noise``."""
        rest = N - j_noise
        if rest < 0 or rest % 2:
            raise DomainError(f"N - J_N = {rest} cannot be split evenly between fundamentalists and speculators")
        return cls(j_noise, rest // 2, rest // 2)


@dataclass(frozen=True)
class BeliefState:
    l_t: float
    e_pt: float = float("nan")
    e_pt_next: float = float("nan")

    @classmethod
    def initial(cls, fv_1: float, mean_div: float) -> "BeliefState":
        return cls(fv_1 + mean_div)


@dataclass
class HeteroPeriodRecord:
    t: int
    event: EventLabel
    imbalance: float
    cumulative_imbalance: float
    bid: float
    ask: float
    mid: float
    q_noise: float
    q_fund: float
    q_spec: float
    beliefs: BeliefState


@dataclass
class HeteroResult:
    path: PricePath
    records: list[HeteroPeriodRecord]
    in_equilibrium: np.ndarray

    @property
    def events(self) -> list[EventLabel]:
        return [r.event for r in self.records]

    @property
    def cumulative_imbalance(self) -> np.ndarray:
        return np.array([r.cumulative_imbalance for r in self.records])


def update_beliefs(prev: BeliefState, prev_price: float, fv_t: float, fv_next: float,
                   params: StrategyParams, mean_div: float) -> BeliefState:
    """Advance the fundamentalist anchor and the speculator price expectations.

    The forward expectation substitutes the current expectation for the
    not-yet-observed price: ``E[p_{t+1}] = g1 * E[p_t] + g2 * FV_{t+1}``.
    """
    l_t = params.alpha_f * prev.l_t + (1.0 - params.alpha_f) * prev_price - mean_div
    e_pt = params.gamma1 * prev_price + params.gamma2 * fv_t
    e_next = params.gamma1 * e_pt + params.gamma2 * fv_next
    return BeliefState(l_t, e_pt, e_next)


def classify_event(beliefs: BeliefState, fv_t: float) -> EventLabel:
    # ties: fundamentalists buy on l <= FV, speculators sell on E[p_{t+1}] <= E[p_t]
    fund_buys = beliefs.l_t <= fv_t
    spec_buys = beliefs.e_pt_next > beliefs.e_pt
    return SIDES_EVENT[(fund_buys, spec_buys)]


def event_imbalance(event: EventLabel, pop: HeteroPopulation) -> float:
    """Demand over supply minus one, with noise traders split evenly."""
    h = 0.5 * pop.j_noise
    jf, js = pop.j_fund, pop.j_spec
    if event is EventLabel.E1:
        num, den = h + jf, h + js
    elif event is EventLabel.E2:
        if pop.j_noise == 0:
            raise DegenerateMarketError("event E2 with no noise traders has no sellers")
        return 2.0 * (jf + js) / pop.j_noise
    elif event is EventLabel.E3:
        if pop.j_noise == 0:
            raise DegenerateMarketError("event E3 with no noise traders has no buyers")
        num, den = h, h + jf + js
    else:
        num, den = h + js, h + jf
    if num <= 0 or den <= 0:
        raise DegenerateMarketError(f"event {event.value} leaves one side of the market empty")
    return num / den - 1.0


def side_counts(event: EventLabel, pop: HeteroPopulation) -> tuple[float, float]:
    """Expected (buyers, sellers) for an event."""
    fund_buys, spec_buys = EVENT_SIDES[event]
    h = 0.5 * pop.j_noise
    buyers = h + pop.j_fund * fund_buys + pop.j_spec * spec_buys
    sellers = h + pop.j_fund * (not fund_buys) + pop.j_spec * (not spec_buys)
    return buyers, sellers


def _prevailing(h: float, q_noise: float, extra_value: float, opposite_count: float) -> float:
    # (h*q + extra) / opposite, split so that extra == 0 and opposite == h return q exactly
    return q_noise * (h / opposite_count) + extra_value / opposite_count


def event_bid_ask(event: EventLabel, pop: HeteroPopulation, q_noise: float, q_fund: float,
                  q_spec: float) -> tuple[float, float, float]:
    """Prevailing (bid, ask, mid).

    The bid is the buyers' quote value over the seller count and the ask
    is the sellers' quote value over the buyer count.
    """
    fund_buys, spec_buys = EVENT_SIDES[event]
    h = 0.5 * pop.j_noise
    buyers, sellers = side_counts(event, pop)
    if buyers <= 0 or sellers <= 0:
        raise DegenerateMarketError(f"event {event.value} leaves one side of the market empty")
    buy_value = pop.j_fund * q_fund * fund_buys + pop.j_spec * q_spec * spec_buys
    sell_value = pop.j_fund * q_fund * (not fund_buys) + pop.j_spec * q_spec * (not spec_buys)
    bid = _prevailing(h, q_noise, buy_value, sellers)
    ask = _prevailing(h, q_noise, sell_value, buyers)
    return bid, ask, 0.5 * (bid + ask)


def hetero_price_path(asset: AssetSpec, pop: HeteroPopulation, params: StrategyParams, T: int) -> HeteroResult:
    """Mid-price path of the fundamentalist/speculator model for t = 1..T."""
    fv = asset.fundamental_values(T, extra=1)
    dbar = asset.mean_dividend
    beliefs = BeliefState.initial(fv[0], dbar)
    prev = fv[0]
    cum = 0.0
    records = []
    bid = np.empty(T)
    ask = np.empty(T)
    mid = np.empty(T)
    imb = np.empty(T)
    for k in range(T):
        beliefs = update_beliefs(beliefs, prev, fv[k], fv[k + 1], params, dbar)
        event = classify_event(beliefs, fv[k])
        q = noise_quote_mean(asset, fv[k], prev)
        q_fund = 0.5 * (beliefs.l_t + fv[k])
        q_spec = 0.5 * (beliefs.e_pt_next + beliefs.e_pt)
        bid[k], ask[k], mid[k] = event_bid_ask(event, pop, q, q_fund, q_spec)
        imb[k] = event_imbalance(event, pop)
        cum += imb[k]
        records.append(HeteroPeriodRecord(k + 1, event, imb[k], cum, bid[k], ask[k], mid[k],
                                          q, q_fund, q_spec, beliefs))
        prev = mid[k]
    path = PricePath(fv=fv[:T], price=mid, bid=bid, ask=ask, imbalance=imb,
                     events=[r.event for r in records])
    return HeteroResult(path, records, _equal(bid, ask))


def _equal(bid: np.ndarray, ask: np.ndarray) -> np.ndarray:
    return np.abs(ask - bid) <= EQ_RTOL * np.maximum(np.abs(ask), np.abs(bid))


def spread_condition(fv_t: float, mean_div: float, gamma2: float) -> bool:
    """True when speculator asks sit above fundamentalist bids (open spread).

    Holds under equal group sizes, ``alpha_f = 1`` and ``gamma1 = 0``.
    """
    if not 2.0 * fv_t > mean_div:
        raise DomainError(f"need 2*FV > mean dividend, got FV={fv_t}, dbar={mean_div}")
    return gamma2 > spread_threshold(fv_t, mean_div)


def spread_threshold(fv_t: float, mean_div: float) -> float:
    return 2.0 * fv_t / (2.0 * fv_t - mean_div)


class Asset2Mode(str, enum.Enum):
    FACTOR_DIRECTIONAL = "FactorDirectional"
    FACTOR_MARKET_NEUTRAL = "FactorMarketNeutral"
    SAME_STRATEGY = "SameStrategy"


def check_limit_case(pop: HeteroPopulation, params_1: StrategyParams, mode: Asset2Mode,
                     params_2: Optional[StrategyParams], asset2: AssetSpec) -> None:
    """Raise ConfigurationError unless the two-asset equilibrium results apply."""
    problems = []
    if not params_1.is_limit_case:
        problems.append("asset 1 strategies need alpha_f = 1 and gamma1 = 0")
    if pop.j_fund != pop.j_spec:
        problems.append("equilibrium requires J_F = J_S")
    if mode is Asset2Mode.SAME_STRATEGY:
        if params_2 is None or not params_2.is_limit_case:
            problems.append("asset 2 strategies need alpha_f = 1 and gamma1 = 0")
        if asset2.mean_dividend != 0:
            problems.append("asset 2 needs a zero mean dividend")
    if problems:
        raise ConfigurationError("; ".join(problems))


def two_asset_hetero_paths(asset1: AssetSpec, asset2: AssetSpec, pop: HeteroPopulation,
                           params_1: StrategyParams, params_2: Optional[StrategyParams] = None,
                           asset2_mode: Asset2Mode | str = Asset2Mode.FACTOR_DIRECTIONAL,
                           T: int = 15, require_limit_case: bool = False) -> tuple[TwoAssetResult, HeteroResult, list]:
    """Price paths when strategic traders also trade a second asset.

    In the factor modes everybody quotes the noise quote on asset 2 and the
    strategic traders take their asset-1 side along the chosen factor. In
    ``SameStrategy`` they run their own strategy on asset 2 with
    ``params_2``.

    Returns the two-asset result, the asset-1 event run, and the asset-2
    event labels.
    """
    mode = Asset2Mode(asset2_mode)
    if mode is Asset2Mode.SAME_STRATEGY and params_2 is None:
        raise ConfigurationError("SameStrategy needs strategy parameters for asset 2")
    if require_limit_case:
        check_limit_case(pop, params_1, mode, params_2, asset2)
    run_1 = hetero_price_path(asset1, pop, params_1, T)

    if mode is Asset2Mode.SAME_STRATEGY:
        run_2 = hetero_price_path(asset2, pop, params_2, T)
        res = TwoAssetResult(run_1.path, run_2.path, run_1.in_equilibrium, run_2.in_equilibrium,
                             np.array([r.q_noise for r in run_1.records]),
                             np.array([r.q_noise for r in run_2.records]))
        return res, run_1, run_2.events

    flip = mode is Asset2Mode.FACTOR_MARKET_NEUTRAL
    fv2 = asset2.fundamental_values(T)
    h = 0.5 * pop.j_noise
    q2 = np.empty(T)
    price = np.empty(T)
    bid = np.empty(T)
    ask = np.empty(T)
    imb = np.empty(T)
    events_2 = []
    prev = fv2[0]
    for k, event in enumerate(run_1.events):
        fund_buys, spec_buys = EVENT_SIDES[event]
        event_2 = SIDES_EVENT[(fund_buys != flip, spec_buys != flip)]
        buyers, sellers = side_counts(event_2, pop)
        if buyers <= 0 or sellers <= 0:
            raise DegenerateMarketError(f"asset 2 event {event_2.value} leaves one side empty")
        q2[k] = noise_quote_mean(asset2, fv2[k], prev)
        imb[k] = (buyers - sellers) / sellers
        price[k] = q2[k] + imb[k]
        bid[k] = q2[k] * (buyers / sellers)
        ask[k] = q2[k] * (sellers / buyers)
        events_2.append(event_2)
        prev = price[k]
    path_2 = PricePath(fv=fv2, price=price, bid=bid, ask=ask, imbalance=imb, events=events_2)
    res = TwoAssetResult(run_1.path, path_2, run_1.in_equilibrium, _equal(bid, ask),
                         np.array([r.q_noise for r in run_1.records]), q2)
    return res, run_1, events_2


def hetero_rd_surface(asset1: AssetSpec, asset2: AssetSpec, params_1: StrategyParams,
                      params_2: Optional[StrategyParams] = None,
                      asset2_mode: Asset2Mode | str = Asset2Mode.FACTOR_DIRECTIONAL,
                      noise_share: Iterable[float] = (50,), kappa2: Optional[Iterable[float]] = None,
                      gamma22: Optional[Iterable[float]] = None, N: int = 100, T: int = 15) -> Surface:
    """RD of both assets over the noise-trader share (percent of N) and one asset-2 knob.

    Fundamentalists and speculators split the remaining traders equally.
    """
    if (kappa2 is None) == (gamma22 is None):
        raise ConfigurationError("sweep exactly one of kappa2 or gamma22")
    second = ("kappa2", kappa2) if kappa2 is not None else ("gamma22", gamma22)

    def cell(noise_share, **knob):
        j_n = N * noise_share / 100.0
        if j_n != int(j_n):
            raise DomainError(f"{noise_share}% of N={N} is not a whole number of traders")
        pop = HeteroPopulation.balanced(N, int(j_n))
        a2, p2 = asset2, params_2
        if "kappa2" in knob:
            a2 = replace(asset2, kappa=knob["kappa2"])
        else:
            p2 = replace(params_2 or StrategyParams(1.0, 0.0, 1.0), gamma2=knob["gamma22"])
        res, _, _ = two_asset_hetero_paths(asset1, a2, pop, params_1, p2, asset2_mode, T)
        return res.path_1.rd, res.path_2.rd

    return run_grid({"noise_share": noise_share, second[0]: second[1]}, cell)
