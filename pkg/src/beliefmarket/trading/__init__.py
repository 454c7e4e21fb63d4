"""Trading strategies, trade execution, and exploitation evaluation."""

from .book import (
    Holdings,
    Trade,
    apply_trade,
    instantiate_trade,
    plausible_value_range,
    world_value,
)
from .exploitation import DailyValuation, ExploitationReport, evaluate_exploitation
from .features import (
    Clamp,
    Const,
    DayIndex,
    FeatureExpr,
    MaxOf,
    MinOf,
    N,
    Neg,
    Price,
    Prod,
    Sum,
    const,
    depth,
    eval_feature,
    lipschitz_bound,
    parse_feature,
    price_references,
    value_bounds,
)
from .traders import Trader, fixed_trader, load_strategy, parse_strategy

__all__ = [
    "Holdings",
    "Trade",
    "apply_trade",
    "instantiate_trade",
    "plausible_value_range",
    "world_value",
    "DailyValuation",
    "ExploitationReport",
    "evaluate_exploitation",
    "Clamp",
    "Const",
    "DayIndex",
    "FeatureExpr",
    "MaxOf",
    "MinOf",
    "N",
    "Neg",
    "Price",
    "Prod",
    "Sum",
    "const",
    "depth",
    "eval_feature",
    "lipschitz_bound",
    "parse_feature",
    "price_references",
    "value_bounds",
    "Trader",
    "fixed_trader",
    "load_strategy",
    "parse_strategy",
]
