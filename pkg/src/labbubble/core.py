"""Shared market types and the small closed-form building blocks.

Everything here is a pure function of its arguments. Currency values are
plain floats in dollars.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class MarketError(Exception):
    """Base class for all errors raised by the engine."""


class DomainError(MarketError, ValueError):
    """An argument lies outside the domain of a formula."""


class DegenerateMarketError(MarketError):
    """Prevailing prices cannot be formed (one side of the market is empty)."""


class ConfigurationError(MarketError, ValueError):
    """A model was asked to run outside the assumptions it is defined under."""


class EventLabel(str, enum.Enum):
    """Joint buy/sell configuration of fundamentalists and speculators."""

    E1 = "E1"  # fundamentalists buy, speculators sell
    E2 = "E2"  # both buy
    E3 = "E3"  # both sell
    E4 = "E4"  # fundamentalists sell, speculators buy


SPECULATIVE_DIVIDENDS = (0.0, 0.10, 0.16, 0.22)
SPECULATIVE_TERMINAL_VALUE = 1.80
HOLDING_COST_DIVIDENDS = (-0.2, -0.1, 0.0, 0.1, 0.2)
HOLDING_COST_TERMINAL_VALUE = 2.80


@dataclass(frozen=True)
class AssetSpec:
    """Dividend process and noise-trader behaviour for one asset.

    ``buyer_prob`` pins the buyer probability to a constant and takes
    precedence over the weak-foresight slope ``phi``.
    """

    dividend_support: tuple[float, ...] = SPECULATIVE_DIVIDENDS
    terminal_value: float = SPECULATIVE_TERMINAL_VALUE
    kappa: float = 4.0
    alpha: float = 0.85
    phi: float = 0.0
    buyer_prob: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "dividend_support", tuple(float(d) for d in self.dividend_support))
        if not self.dividend_support:
            raise DomainError("dividend_support must not be empty")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in the open interval (0, 1), got {self.alpha}")
        if not self.phi >= 0:
            raise DomainError(f"phi must be >= 0, got {self.phi}")
        if self.buyer_prob is not None and not 0 <= self.buyer_prob <= 1:
            raise DomainError(f"buyer_prob must lie in [0, 1], got {self.buyer_prob}")

    @property
    def mean_dividend(self) -> float:
        return math.fsum(self.dividend_support) / len(self.dividend_support)

    def check_horizon(self, T: int) -> None:
        """Raise if ``phi`` violates ``phi < 0.5 / T``."""
        if self.buyer_prob is None and not self.phi < 0.5 / T:
            raise DomainError(
                f"phi must satisfy phi in [0, 0.5/T) = [0, {0.5 / T:.6g}) for T={T}, got {self.phi}"
            )

    def buyer_probabilities(self, T: int) -> np.ndarray:
        if self.buyer_prob is not None:
            return np.full(T, float(self.buyer_prob))
        return np.array([buyer_probability(self.phi, t) for t in range(1, T + 1)])

    def fundamental_values(self, T: int, extra: int = 0) -> np.ndarray:
        """FV for t = 1..T+extra; periods past T have no dividends left."""
        t = np.arange(1, T + extra + 1)
        remaining = np.maximum(T - t + 1, 0)
        return remaining * self.mean_dividend + self.terminal_value


def speculative_asset(**kw) -> AssetSpec:
    """Declining-FV asset with the four-point dividend support {0, .10, .16, .22}."""
    return AssetSpec(SPECULATIVE_DIVIDENDS, SPECULATIVE_TERMINAL_VALUE, **kw)


def value_asset(**kw) -> AssetSpec:
    """Constant-FV asset whose dividends average to zero."""
    return AssetSpec(HOLDING_COST_DIVIDENDS, HOLDING_COST_TERMINAL_VALUE, **kw)


@dataclass(frozen=True)
class MarketSpec:
    periods: int = 15
    assets: tuple[AssetSpec, ...] = (AssetSpec(),)

    def __post_init__(self):
        if self.periods < 1:
            raise DomainError(f"periods must be >= 1, got {self.periods}")
        if not 1 <= len(self.assets) <= 2:
            raise DomainError("a market holds one or two assets")

    def initial_price(self, i: int = 0) -> float:
        # the opening anchor is FV at t=1, never zero
        return fundamental_value(self.assets[i], 1, self.periods)


@dataclass
class PricePath:
    """Per-period series for t = 1..T.

    ``events`` is only populated by the fundamentalist/speculator model.
    """

    fv: np.ndarray
    price: np.ndarray
    bid: np.ndarray
    ask: np.ndarray
    imbalance: np.ndarray
    events: Optional[list[EventLabel]] = None
    rd_t: np.ndarray = field(init=False)
    rd: float = field(init=False)

    def __post_init__(self):
        self.rd_t, self.rd = rd_measure(self.price, self.fv)

    @property
    def T(self) -> int:
        return len(self.price)

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.T + 1)


def fundamental_value(asset: AssetSpec, t: int, T: int) -> float:
    """Expected remaining dividends plus terminal value, ``(T-t+1)*dbar + TV``."""
    if not 1 <= t <= T:
        raise DomainError(f"period t={t} outside 1..{T}")
    return (T - t + 1) * asset.mean_dividend + asset.terminal_value


def buyer_probability(phi: float, t: int) -> float:
    """Weak-foresight buyer probability ``max(0.5 - phi*t, 0)``."""
    if phi < 0:
        raise DomainError(f"phi must be >= 0, got {phi}")
    return max(0.5 - phi * t, 0.0)


def noise_quote_mean(asset: AssetSpec, fv_t: float, prev_price: float) -> float:
    """Average noise-trader quote: uniform draw on [0, kappa*FV] anchored to the last price."""
    return (1.0 - asset.alpha) * asset.kappa * fv_t / 2.0 + asset.alpha * prev_price


def endowment_bound(asset: AssetSpec, T: int) -> float:
    """Cash that lets any trader post one bid in every period without going broke.

    Every quote stays below ``kappa * FV_1`` when ``kappa > 1``, so T of them
    cost at most ``kappa * FV_1 * T``.
    """
    if not asset.kappa > 1:
        raise DomainError(f"the endowment bound needs kappa > 1, got {asset.kappa}")
    return asset.kappa * fundamental_value(asset, 1, T) * T


def rd_measure(prices: Sequence[float], fvs: Sequence[float]) -> tuple[np.ndarray, float]:
    """Relative deviation of price from fundamental value.

    Returns the per-period series ``(p_t - FV_t) / |mean(FV)|`` and its time average.
    """
    p = np.asarray(prices, dtype=float)
    f = np.asarray(fvs, dtype=float)
    if p.shape != f.shape or p.ndim != 1 or len(p) < 1:
        raise DomainError("prices and fvs must be equal-length 1-d series with T >= 1")
    scale = abs(f.mean())
    if scale == 0:
        raise DomainError("mean fundamental value is zero; RD is undefined")
    rd_t = (p - f) / scale
    return rd_t, float(rd_t.mean())
