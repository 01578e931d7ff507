"""Two-asset market with noise, directional and market-neutral traders.

Directional and market-neutral traders read their side on asset 1 and
trade asset 2 along the factor vectors ``[1, 1]`` and ``[1, -1]``. Noise
traders flip an independent coin on asset 2 with probability one half.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import AssetSpec, DegenerateMarketError, DomainError, PricePath, noise_quote_mean
from .homogeneous import Surface, average_price_path, run_grid

DIRECTIONAL = np.array([1, 1])
MARKET_NEUTRAL = np.array([1, -1])

ASSET2_BUYER_PROB = 0.5


@dataclass(frozen=True)
class FactorPopulation:
    j_noise: int
    j_directional: int
    j_market_neutral: int

    def __post_init__(self):
        counts = (self.j_noise, self.j_directional, self.j_market_neutral)
        if any(int(c) != c or c < 0 for c in counts):
            raise DomainError(f"trader counts must be nonnegative integers, got {counts}")
        if sum(counts) == 0:
            raise DomainError("population is empty")

    @property
    def N(self) -> int:
        return self.j_noise + self.j_directional + self.j_market_neutral

    @classmethod
    def from_shares(cls, N: int, noise: float, directional: float, market_neutral: float):
        """Build from percentages of ``N``; the rounded counts must add up to ``N``."""
        counts = [round(N * s / 100.0) for s in (noise, directional, market_neutral)]
        if sum(counts) != N:
            raise DomainError(f"shares {noise}/{directional}/{market_neutral}% of N={N} round to "
                              f"{counts}, which do not sum to N")
        return cls(*counts)


@dataclass
class TwoAssetResult:
    path_1: PricePath
    path_2: PricePath
    equilibrium_1: np.ndarray
    equilibrium_2: np.ndarray
    quote_1: Optional[np.ndarray] = None
    quote_2: Optional[np.ndarray] = None


def asset2_demand_supply(pop: FactorPopulation, pi1: float, pi2: float = ASSET2_BUYER_PROB):
    """Expected buyer and seller counts on asset 2."""
    jn, jd, jm = pop.j_noise, pop.j_directional, pop.j_market_neutral
    demand = jn * pi2 + jd * pi1 + jm * (1.0 - pi1)
    supply = jn * (1.0 - pi2) + jd * (1.0 - pi1) + jm * pi1
    return demand, supply


def asset2_imbalance(pop: FactorPopulation, pi1: float, pi2: float = ASSET2_BUYER_PROB) -> float:
    """Demand over supply minus one on asset 2.

    Computed from the demand-supply difference so that balanced cases give
    exactly zero.
    """
    demand, supply = asset2_demand_supply(pop, pi1, pi2)
    if demand <= 0 or supply <= 0:
        raise DegenerateMarketError("asset 2 has no buyers or no sellers")
    excess = pop.j_noise * (2.0 * pi2 - 1.0) + (pop.j_directional - pop.j_market_neutral) * (2.0 * pi1 - 1.0)
    return excess / supply


def asset2_prevailing(pop: FactorPopulation, pi1: float, pi2: float, q2: float):
    """Prevailing (bid, ask) on asset 2 when every trader quotes ``q2``."""
    ratio = 1.0 + asset2_imbalance(pop, pi1, pi2)
    return ratio * q2, q2 / ratio


def check_equilibrium_conditions(pop: FactorPopulation, pi1: float, pi2: float) -> dict[str, bool]:
    """Which assets clear with bid equal to ask at these buyer probabilities."""
    balanced = pop.j_directional == pop.j_market_neutral
    return {"asset1": pi1 == 0.5, "asset2": pi2 == 0.5 and (balanced or pi1 == 0.5)}


def factor_price_paths(asset1: AssetSpec, asset2: AssetSpec, pop: FactorPopulation, T: int) -> TwoAssetResult:
    """Average price paths of both assets.

    Asset 1 behaves exactly as the noise-only market. On asset 2 the price is
    the common quote plus the demand/supply imbalance of the factor mix.
    """
    hom = average_price_path(asset1, T)
    pis = hom.buyer_prob
    fv2 = asset2.fundamental_values(T)
    q2 = np.empty(T)
    price = np.empty(T)
    bid = np.empty(T)
    ask = np.empty(T)
    imb = np.empty(T)
    prev = fv2[0]
    for k in range(T):
        q2[k] = noise_quote_mean(asset2, fv2[k], prev)
        imb[k] = asset2_imbalance(pop, pis[k])
        price[k] = q2[k] + imb[k]
        bid[k], ask[k] = asset2_prevailing(pop, pis[k], ASSET2_BUYER_PROB, q2[k])
        prev = price[k]
    eq2 = np.array([check_equilibrium_conditions(pop, p, ASSET2_BUYER_PROB)["asset2"] for p in pis])
    path_2 = PricePath(fv=fv2, price=price, bid=bid, ask=ask, imbalance=imb)
    return TwoAssetResult(hom.path, path_2, hom.in_equilibrium, eq2, hom.quote, q2)


def factor_rd_surface(asset1: AssetSpec, asset2: AssetSpec, T: int, pi1: Iterable[float],
                      j_mn: Iterable[int], j_n: int = 50, N: int = 100) -> Surface:
    """RD of both assets over constant asset-1 buyer probabilities and market-neutral counts.

    Directional traders fill the remainder, ``J_D = N - J_N - J_MN``.
    """

    def cell(pi1, j_mn):
        j_d = N - j_n - j_mn
        if j_d < 0:
            raise DomainError(f"J_D = N - J_N - J_MN = {j_d} < 0")
        a1 = AssetSpec(asset1.dividend_support, asset1.terminal_value, asset1.kappa, asset1.alpha,
                       asset1.phi, buyer_prob=pi1)
        res = factor_price_paths(a1, asset2, FactorPopulation(j_n, j_d, j_mn), T)
        return res.path_1.rd, res.path_2.rd

    return run_grid({"pi1": pi1, "j_mn": j_mn}, cell)
