"""Replaying a trader against a recorded market and judging exploitation.

At a finite horizon the asymptotic notion (plausible value unbounded above
while bounded below) cannot be decided, so the report exposes the full
trajectory of per-day plausible-value extrema plus a stated trend heuristic
as a verdict, never as a proof: the verdict flags an exploitation trend when
the running minimum stops falling over the last quartile of the horizon
while the running maximum makes a new high on every day of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..deduction import DeductiveProcess
from ..logic import FragmentContext
from .book import Holdings, apply_trade, instantiate_trade, plausible_value_range
from .traders import Trader


@dataclass(frozen=True)
class DailyValuation:
    day: int
    low: Fraction
    high: Fraction


@dataclass(frozen=True)
class ExploitationReport:
    trader_name: str
    horizon: int
    daily: tuple[DailyValuation, ...]
    running_min: tuple[Fraction, ...]
    running_max: tuple[Fraction, ...]
    bounded_below: bool
    rising_max: bool

    @property
    def exploitation_trend(self) -> bool:
        return self.bounded_below and self.rising_max

    @property
    def overall_min(self) -> Fraction:
        return self.running_min[-1]

    @property
    def final_max(self) -> Fraction:
        return self.running_max[-1]


def _trend_flags(
    running_min: Sequence[Fraction], running_max: Sequence[Fraction]
) -> tuple[bool, bool]:
    horizon = len(running_min)
    quartile = horizon // 4
    if quartile < 1:
        return False, False
    start = horizon - quartile
    bounded = all(running_min[i] == running_min[start - 1] for i in range(start, horizon))
    rising = all(running_max[i] > running_max[i - 1] for i in range(start, horizon))
    return bounded, rising


def evaluate_exploitation(
    trader: Trader,
    pricings: Sequence[dict],
    deduction: DeductiveProcess,
    horizon: int,
) -> ExploitationReport:
    """Replay ``trader`` against recorded pricings for days 1..horizon.

    Each day the trader's template executes in full (no budget scaling), the
    holdings accumulate, and their value extrema are taken over the worlds
    plausible under that day's deduced fragment.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if horizon > len(pricings):
        raise ValueError(
            f"market trace covers {len(pricings)} day(s), horizon {horizon} requested"
        )
    holdings = Holdings.empty()
    daily: list[DailyValuation] = []
    running_min: list[Fraction] = []
    running_max: list[Fraction] = []
    for day in range(1, horizon + 1):
        trade = instantiate_trade(trader, pricings[:day], day)
        holdings = apply_trade(holdings, trade)
        context = FragmentContext(deduction.step(day), day=day)
        low, high = plausible_value_range(holdings, context)
        daily.append(DailyValuation(day, low, high))
        running_min.append(min(low, running_min[-1]) if running_min else low)
        running_max.append(max(high, running_max[-1]) if running_max else high)
    bounded, rising = _trend_flags(running_min, running_max)
    return ExploitationReport(
        trader_name=trader.name,
        horizon=horizon,
        daily=tuple(daily),
        running_min=tuple(running_min),
        running_max=tuple(running_max),
        bounded_below=bounded,
        rising_max=rising,
    )
