"""Monte Carlo sessions with batch clearing, used as an oracle for the analytic paths.

Every agent posts one single-share quote per period and asset. The
prevailing bid is the buyers' quote value over the seller count and the
prevailing ask is the sellers' quote value over the buyer count. Session
averages are ratio-of-means: aggregate quote value over aggregate
opposite-side count, which is how the averaged model defines them.

The anchor carried to the next period is selectable. ``quote_mean`` keeps
the equilibrium path unbiased; ``imbalance`` adds buyers/sellers - 1 to the
quote mean and so follows the non-equilibrium recursion up to an O(1/N)
bias of the per-session count ratio.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..core import ConfigurationError, DomainError, MarketSpec, endowment_bound
from ..factor import FactorPopulation
from ..hetero import HeteroPopulation, StrategyParams
from ._backend import resolve_backend
from .kernels import (
    ANCHOR_IMBALANCE,
    ANCHOR_MID,
    ANCHOR_QUOTE_MEAN,
    DIRECTIONAL,
    FUNDAMENTALIST,
    KERNELS,
    MARKET_NEUTRAL,
    NOISE,
    SPECULATOR,
)
from .rng import stream_key


class Anchor(str, enum.Enum):
    """Price that anchors the next period's noise quotes within a session."""

    QUOTE_MEAN = "quote_mean"  # mean posted (= traded) quote of the period
    MID = "mid"  # mid of the session's prevailing bid and ask
    IMBALANCE = "imbalance"  # mean quote plus buyers/sellers - 1, the averaged price update


Population = Union[FactorPopulation, HeteroPopulation]


@dataclass(frozen=True)
class SimulationConfig:
    market: MarketSpec
    population: Population
    sessions: int = 1000
    seed: int = 0
    strategy: StrategyParams = field(default_factory=StrategyParams)
    anchor: Anchor = Anchor.QUOTE_MEAN
    funding: Optional[float] = None  # None: the no-bankruptcy bound summed over assets
    clearing: str = "Batch"

    def __post_init__(self):
        if self.sessions < 1:
            raise DomainError(f"sessions must be >= 1, got {self.sessions}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.clearing != "Batch":
            raise ConfigurationError(f"unsupported clearing {self.clearing!r}; only Batch")
        object.__setattr__(self, "anchor", Anchor(self.anchor))
        pop = self.population
        if isinstance(pop, HeteroPopulation) and len(self.market.assets) > 1 and pop.j_fund + pop.j_spec:
            raise ConfigurationError("fundamentalists and speculators are simulated on one asset only")
        for a in self.market.assets:
            a.check_horizon(self.market.periods)

    @property
    def cash_endowment(self) -> float:
        if self.funding is not None:
            return float(self.funding)
        return sum(endowment_bound(a, self.market.periods) for a in self.market.assets)


def agent_types(pop: Population) -> np.ndarray:
    if isinstance(pop, FactorPopulation):
        parts = [(NOISE, pop.j_noise), (DIRECTIONAL, pop.j_directional), (MARKET_NEUTRAL, pop.j_market_neutral)]
    else:
        parts = [(NOISE, pop.j_noise), (FUNDAMENTALIST, pop.j_fund), (SPECULATOR, pop.j_spec)]
    return np.concatenate([np.full(n, code, np.int64) for code, n in parts])


@dataclass
class SessionOutcome:
    """Raw per-session results, arrays shaped (sessions, T, assets)."""

    buyers: np.ndarray
    sellers: np.ndarray
    sum_bid_quotes: np.ndarray
    sum_ask_quotes: np.ndarray
    anchor: np.ndarray
    max_quote: np.ndarray
    min_cash: np.ndarray
    first_violation: np.ndarray  # period of first negative cash per session, 0 if none

    @property
    def degenerate(self) -> np.ndarray:
        return (self.buyers == 0) | (self.sellers == 0)

    @property
    def bid(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.degenerate, np.nan, self.sum_bid_quotes / self.sellers)

    @property
    def ask(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.degenerate, np.nan, self.sum_ask_quotes / self.buyers)

    @property
    def price(self) -> np.ndarray:
        """Session price: mid of the session's prevailing bid and ask."""
        return 0.5 * (self.bid + self.ask)


@dataclass
class Aggregate:
    """Cross-session estimates, arrays shaped (T, assets)."""

    bid: np.ndarray
    bid_se: np.ndarray
    ask: np.ndarray
    ask_se: np.ndarray
    price: np.ndarray
    price_se: np.ndarray
    quote: np.ndarray
    quote_se: np.ndarray
    buyer_fraction: np.ndarray
    buyer_fraction_se: np.ndarray
    buyer_seller_ratio: np.ndarray
    buyer_seller_ratio_se: np.ndarray
    session_mid: np.ndarray
    session_mid_se: np.ndarray
    imbalance_price: np.ndarray
    imbalance_price_se: np.ndarray
    excluded: np.ndarray
    sessions: int
    outcome: SessionOutcome


def _ratio(y: np.ndarray, x: np.ndarray, n: np.ndarray):
    """Ratio-of-means estimate and its linearised residuals, over axis 0."""
    xbar = x.sum(axis=0) / n
    r = y.sum(axis=0) / x.sum(axis=0)
    resid = (y - r * x) / xbar
    return r, resid


def _se(z: np.ndarray, valid: np.ndarray, n: np.ndarray) -> np.ndarray:
    # z is zero-mean up to rounding on valid rows
    zc = np.where(valid, z - np.where(valid, z, 0.0).sum(axis=0) / n, 0.0)
    return np.sqrt((zc ** 2).sum(axis=0) / (n * (n - 1)))


def aggregate(out: SessionOutcome, N: int) -> Aggregate:
    valid = ~out.degenerate
    n = valid.sum(axis=0).astype(float)
    S = out.buyers.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        buyers = np.where(valid, out.buyers, 0).astype(float)
        sellers = np.where(valid, out.sellers, 0).astype(float)
        sb = np.where(valid, out.sum_bid_quotes, 0.0)
        ss = np.where(valid, out.sum_ask_quotes, 0.0)
        bid, rb = _ratio(sb, sellers, n)
        ask, ra = _ratio(ss, buyers, n)
        ratio, rr = _ratio(buyers, sellers, n)
        qm = np.where(valid, (sb + ss) / N, 0.0)
        frac = np.where(valid, buyers / N, 0.0)
        mid = np.where(valid, out.price, 0.0)
        return Aggregate(
            bid=bid, bid_se=_se(rb, valid, n),
            ask=ask, ask_se=_se(ra, valid, n),
            price=0.5 * (bid + ask), price_se=_se(0.5 * (rb + ra), valid, n),
            quote=qm.sum(axis=0) / n, quote_se=_se(qm, valid, n),
            buyer_fraction=frac.sum(axis=0) / n, buyer_fraction_se=_se(frac, valid, n),
            buyer_seller_ratio=ratio, buyer_seller_ratio_se=_se(rr, valid, n),
            session_mid=mid.sum(axis=0) / n, session_mid_se=_se(mid, valid, n),
            imbalance_price=qm.sum(axis=0) / n + ratio - 1.0, imbalance_price_se=_se(qm + rr, valid, n),
            excluded=S - n.astype(np.int64), sessions=S, outcome=out,
        )


def noise_buyer_probabilities(asset, T: int, index: int) -> np.ndarray:
    """Asset 1 follows its own rule; on asset 2 noise traders buy with probability 1/2 unless pinned."""
    if index == 0 or asset.buyer_prob is not None:
        return asset.buyer_probabilities(T)
    return np.full(T, 0.5)


_ANCHOR_CODES = {Anchor.QUOTE_MEAN: ANCHOR_QUOTE_MEAN, Anchor.MID: ANCHOR_MID, Anchor.IMBALANCE: ANCHOR_IMBALANCE}


def simulate(config: SimulationConfig, backend: Optional[str] = None,
             sessions: Optional[np.ndarray] = None) -> SessionOutcome:
    """Run the kernel for the given session indices (default ``0..sessions-1``)."""
    market = config.market
    T = market.periods
    assets = market.assets
    A = len(assets)
    params = config.strategy
    if sessions is None:
        sessions = np.arange(config.sessions, dtype=np.uint64)
    keys = np.array([stream_key(config.seed, k) for k in range(2 * A)], dtype=np.uint64)
    kernel = KERNELS[resolve_backend(backend)]
    res = kernel(
        np.ascontiguousarray(sessions, dtype=np.uint64),
        agent_types(config.population),
        np.array([a.kappa for a in assets]),
        np.array([a.alpha for a in assets]),
        np.array([a.mean_dividend for a in assets]),
        np.full(A, params.alpha_f),
        np.full(A, params.gamma1),
        np.full(A, params.gamma2),
        np.stack([a.fundamental_values(T, extra=1) for a in assets]),
        np.stack([noise_buyer_probabilities(a, T, i) for i, a in enumerate(assets)]),
        keys,
        config.cash_endowment,
        _ANCHOR_CODES[config.anchor],
    )
    return SessionOutcome(*res)


def run_sessions(config: SimulationConfig, backend: Optional[str] = None) -> Aggregate:
    """Simulate ``config.sessions`` independent sessions and average them."""
    out = simulate(config, backend)
    return aggregate(out, config.population.N)


@dataclass
class BankruptcyReport:
    solvent: bool
    funding: float
    min_cash: float
    worst_shortfall: float
    sessions_violated: int
    first_violation: Optional[tuple[int, int]]  # (session, period)


def verify_no_bankruptcy(config: SimulationConfig, backend: Optional[str] = None) -> BankruptcyReport:
    """Charge every posted bid as if it filled and report whether cash ever goes negative."""
    out = simulate(config, backend)
    bad = np.flatnonzero(out.first_violation)
    first = None
    if bad.size:
        s = int(bad[np.argmin(out.first_violation[bad])])
        first = (s, int(out.first_violation[s]))
    low = float(out.min_cash.min())
    return BankruptcyReport(bad.size == 0, config.cash_endowment, low, max(0.0, -low), int(bad.size), first)
