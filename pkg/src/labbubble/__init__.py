"""Averaged price dynamics of laboratory asset markets with noise, factor and strategic traders."""

from .core import (
    AssetSpec,
    ConfigurationError,
    DegenerateMarketError,
    DomainError,
    EventLabel,
    MarketError,
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
from .factor import FactorPopulation, TwoAssetResult, check_equilibrium_conditions, factor_price_paths, factor_rd_surface
from .hetero import (
    Asset2Mode,
    HeteroPopulation,
    HeteroResult,
    StrategyParams,
    event_imbalance,
    hetero_price_path,
    hetero_rd_surface,
    spread_condition,
    two_asset_hetero_paths,
)
from .homogeneous import HomogeneousResult, average_price_path, equilibrium_exists, sweep_rd

__version__ = "0.1.0"

__all__ = [
    "Asset2Mode",
    "AssetSpec",
    "ConfigurationError",
    "DegenerateMarketError",
    "DomainError",
    "EventLabel",
    "FactorPopulation",
    "HeteroPopulation",
    "HeteroResult",
    "HomogeneousResult",
    "MarketError",
    "MarketSpec",
    "PricePath",
    "StrategyParams",
    "TwoAssetResult",
    "average_price_path",
    "buyer_probability",
    "check_equilibrium_conditions",
    "endowment_bound",
    "equilibrium_exists",
    "event_imbalance",
    "factor_price_paths",
    "factor_rd_surface",
    "fundamental_value",
    "hetero_price_path",
    "hetero_rd_surface",
    "noise_quote_mean",
    "rd_measure",
    "speculative_asset",
    "spread_condition",
    "sweep_rd",
    "two_asset_hetero_paths",
    "value_asset",
]
