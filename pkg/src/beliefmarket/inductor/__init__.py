"""The market-making engine: pools, budgets, and certified pricing."""

from .builtin import (
    complement_arbitrageur,
    oscillation_arbitrageur,
    reflection_arbitrageur,
    theorem_buyer,
)
from .engine import (
    DayCertificate,
    InductorConfig,
    MarketTrace,
    Pricing,
    default_epsilon,
    find_prices,
    firm_trade,
    run_inductor,
    support_sentences,
)
from .pool import PoolMember, TraderPool, budget_scale, scale_for_budget

__all__ = [
    "complement_arbitrageur",
    "oscillation_arbitrageur",
    "reflection_arbitrageur",
    "theorem_buyer",
    "DayCertificate",
    "InductorConfig",
    "MarketTrace",
    "Pricing",
    "default_epsilon",
    "find_prices",
    "firm_trade",
    "run_inductor",
    "support_sentences",
    "PoolMember",
    "TraderPool",
    "budget_scale",
    "scale_for_budget",
]
