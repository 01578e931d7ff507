"""Monte Carlo oracle for the averaged price dynamics."""

from .oracle import (
    Aggregate,
    Anchor,
    BankruptcyReport,
    SessionOutcome,
    SimulationConfig,
    aggregate,
    run_sessions,
    simulate,
    verify_no_bankruptcy,
)

__all__ = [
    "Aggregate",
    "Anchor",
    "BankruptcyReport",
    "SessionOutcome",
    "SimulationConfig",
    "aggregate",
    "run_sessions",
    "simulate",
    "verify_no_bankruptcy",
]
