"""Average price dynamics of a market populated only by noise traders."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import (
    AssetSpec,
    DegenerateMarketError,
    MarketError,
    PricePath,
    buyer_probability,
    noise_quote_mean,
)


@dataclass
class HomogeneousResult:
    path: PricePath
    quote: np.ndarray
    buyer_prob: np.ndarray
    in_equilibrium: np.ndarray
    asset: AssetSpec


def imbalance_ratio(pi: float) -> float:
    """Demand over supply, ``pi / (1 - pi)``."""
    if pi <= 0 or pi >= 1:
        raise DegenerateMarketError(f"buyer probability {pi} leaves one side of the market empty")
    return pi / (1.0 - pi)


def average_price_path(asset: AssetSpec, T: int) -> HomogeneousResult:
    """Iterate quote -> prevailing prices -> average price for t = 1..T.

    The average price feeds the next period's quote anchor. The imbalance
    ``pi/(1-pi) - 1`` is added to the quote as is, in dollars.
    """
    asset.check_horizon(T)
    fv = asset.fundamental_values(T)
    pis = asset.buyer_probabilities(T)
    q = np.empty(T)
    price = np.empty(T)
    bid = np.empty(T)
    ask = np.empty(T)
    imb = np.empty(T)
    prev = fv[0]
    for k in range(T):
        r = imbalance_ratio(pis[k])
        q[k] = noise_quote_mean(asset, fv[k], prev)
        imb[k] = r - 1.0
        price[k] = q[k] + imb[k]
        bid[k] = r * q[k]
        ask[k] = q[k] / r
        prev = price[k]
    path = PricePath(fv=fv, price=price, bid=bid, ask=ask, imbalance=imb)
    return HomogeneousResult(path, q, pis, pis == 0.5, asset)


def equilibrium_exists(phi: float, t: int) -> bool:
    """Bid equals ask exactly when the buyer probability is one half."""
    return buyer_probability(phi, t) == 0.5


@dataclass
class SweepCell:
    """One grid point of a parameter sweep; failed cells keep ``error`` and NaN RDs."""

    params: dict
    rd_1: float = float("nan")
    rd_2: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Surface:
    axes: dict[str, list]
    cells: list[SweepCell] = field(default_factory=list)

    def grid(self, key: str = "rd_1") -> np.ndarray:
        """RD values reshaped to the axis grid (row-major)."""
        shape = tuple(len(v) for v in self.axes.values())
        return np.array([getattr(c, key) for c in self.cells], dtype=float).reshape(shape)


def run_grid(axes: dict[str, Iterable], cell_fn) -> Surface:
    """Evaluate ``cell_fn(**params)`` over the row-major product of ``axes``.

    ``cell_fn`` returns ``(rd_1, rd_2_or_None)``. Model errors are recorded
    on the cell and the sweep continues.
    """
    axes = {k: list(v) for k, v in axes.items()}
    surface = Surface(axes)
    for combo in itertools.product(*axes.values()):
        params = dict(zip(axes, combo))
        cell = SweepCell(params)
        try:
            cell.rd_1, cell.rd_2 = cell_fn(**params)
        except MarketError as exc:
            cell.error = f"{type(exc).__name__}: {exc}"
        surface.cells.append(cell)
    return surface


def sweep_rd(kappa: Iterable[float], alpha: Iterable[float], phi: Iterable[float], T: int = 15,
             base: Optional[AssetSpec] = None) -> Surface:
    """Average RD of the noise-trader path over a (kappa, alpha, phi) grid."""
    base = base or AssetSpec()

    def cell(kappa, alpha, phi):
        spec = AssetSpec(base.dividend_support, base.terminal_value, kappa, alpha, phi)
        return average_price_path(spec, T).path.rd, None

    return run_grid({"kappa": kappa, "alpha": alpha, "phi": phi}, cell)
