"""Weighted, budgeted trader pools.

Each member trades on its own book with a hard risk budget: its executed
trades are scaled so the book's worst plausible value never drops below
minus the budget. Weights mix the members' scaled trades into the firm's
aggregate order; activation ramps members in over the first days.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from ..errors import ConfigError
from ..logic import FragmentContext, TheoryFragment
from ..trading import Holdings, Trade, Trader, apply_trade, plausible_value_range

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class PoolMember:
    trader: Trader
    weight: Fraction
    budget: Fraction

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ConfigError(f"member {self.trader.name!r}: weight must be positive")
        if self.budget <= 0:
            raise ConfigError(f"member {self.trader.name!r}: budget must be positive")


@dataclass(frozen=True)
class TraderPool:
    members: tuple[PoolMember, ...]
    activation: Optional[Callable[[int], int]] = None

    @classmethod
    def of(cls, members: Sequence[PoolMember], activation=None) -> "TraderPool":
        return cls(tuple(members), activation)

    def __len__(self) -> int:
        return len(self.members)

    def active_count(self, day: int) -> int:
        """Number of members trading on the day; default min(day, pool size)."""
        if self.activation is None:
            count = min(day, len(self.members))
        else:
            count = self.activation(day)
        return max(0, min(count, len(self.members)))


def scale_for_budget(
    worst_now: Fraction, worst_with_trade: Fraction, budget: Fraction
) -> Fraction:
    """Largest certified scale in [0, 1] keeping the post-trade floor >= -budget.

    The floor of holdings plus a scaled trade is concave in the scale, so the
    chord from the current floor (scale 0) to the full-trade floor (scale 1)
    certifies every scale up to its -budget crossing: zero when the budget is
    already exhausted, one when the full trade does not lower the floor, and
    (budget + floor) / drop in between.
    """
    if budget + worst_now <= 0:
        return ZERO
    drop = worst_now - worst_with_trade
    if drop <= 0:
        return ONE
    return min(ONE, (budget + worst_now) / drop)


def budget_scale(
    holdings: Holdings,
    trade: Trade,
    fragment: Union[TheoryFragment, FragmentContext],
    budget: Fraction,
) -> Fraction:
    """Scale the trade so the member's book stays within its budget."""
    worst_now = plausible_value_range(holdings, fragment)[0]
    worst_with = plausible_value_range(apply_trade(holdings, trade), fragment)[0]
    return scale_for_budget(worst_now, worst_with, budget)
