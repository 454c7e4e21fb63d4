"""Trades, holdings, and plausible-value accounting.

A trade is self-financing: its cash leg exactly offsets the share purchases
at the pricing it executed against, so a trade's value in a world reduces to
``sum(shares * (truth - price))``. Holdings are the running componentwise sum
of executed trades.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from ..logic import FragmentContext, Sentence, TheoryFragment, World, eval_sentence, sort_key
from .features import eval_feature
from .traders import Trader

ZERO = Fraction(0)

SharePairs = tuple[tuple[Sentence, Fraction], ...]


def _normalize(shares: Mapping[Sentence, Fraction]) -> SharePairs:
    pairs = [(s, q) for s, q in shares.items() if q != 0]
    pairs.sort(key=lambda sq: sort_key(sq[0]))
    return tuple(pairs)


@dataclass(frozen=True)
class Trade:
    """One day's executed buy/sell order set with its self-financing cash leg."""

    shares: SharePairs
    cash: Fraction

    @classmethod
    def build(cls, shares: Mapping[Sentence, Fraction], cash: Fraction) -> "Trade":
        return cls(_normalize(shares), Fraction(cash))

    @classmethod
    def zero(cls) -> "Trade":
        return cls((), ZERO)

    def shares_dict(self) -> dict[Sentence, Fraction]:
        return dict(self.shares)

    def share(self, sentence: Sentence) -> Fraction:
        for held, quantity in self.shares:
            if held == sentence:
                return quantity
        return ZERO

    @property
    def is_zero(self) -> bool:
        return not self.shares and self.cash == 0

    def scaled(self, factor: Fraction) -> "Trade":
        if factor == 1:
            return self
        return Trade(
            tuple((s, q * factor) for s, q in self.shares if q * factor != 0),
            self.cash * factor,
        )


@dataclass(frozen=True)
class Holdings:
    """Cumulative cash plus share positions."""

    shares: SharePairs = ()
    cash: Fraction = ZERO

    @classmethod
    def empty(cls) -> "Holdings":
        return cls((), ZERO)

    def shares_dict(self) -> dict[Sentence, Fraction]:
        return dict(self.shares)

    def share(self, sentence: Sentence) -> Fraction:
        for held, quantity in self.shares:
            if held == sentence:
                return quantity
        return ZERO

    @property
    def sentences(self) -> tuple[Sentence, ...]:
        return tuple(s for s, _ in self.shares)


def instantiate_trade(
    trader: Trader,
    history: Sequence[Mapping[Sentence, Fraction]],
    day: int,
) -> Trade:
    """Evaluate the trader's day template against the day's (and past) prices.

    ``history`` must cover days 1..day with the day's pricing last. Rows on
    the same sentence accumulate; zero coefficients drop out. The cash leg is
    set so the trade is exactly self-financing at the day's prices.
    """
    current = history[day - 1]
    shares: dict[Sentence, Fraction] = {}
    for sentence, expr in trader.day_template(day):
        quantity = eval_feature(expr, history, day)
        if quantity == 0:
            continue
        shares[sentence] = shares.get(sentence, ZERO) + quantity
    cash = ZERO
    for sentence, quantity in shares.items():
        cash -= quantity * current.get(sentence, ZERO)
    return Trade.build(shares, cash)


def apply_trade(holdings: Holdings, trade: Trade) -> Holdings:
    """Componentwise sum of holdings and a trade."""
    shares = holdings.shares_dict()
    for sentence, quantity in trade.shares:
        shares[sentence] = shares.get(sentence, ZERO) + quantity
    return Holdings(_normalize(shares), holdings.cash + trade.cash)


def world_value(holdings: Union[Holdings, Trade], world: World) -> Fraction:
    """Cash plus one dollar per share of each sentence true in the world."""
    total = holdings.cash
    for sentence, quantity in holdings.shares:
        if eval_sentence(sentence, world):
            total += quantity
    return total


def plausible_value_range(
    holdings: Union[Holdings, Trade],
    fragment: Union[TheoryFragment, FragmentContext],
) -> tuple[Fraction, Fraction]:
    """Extrema of :func:`world_value` over the fragment's plausible worlds."""
    context = (
        fragment
        if isinstance(fragment, FragmentContext)
        else FragmentContext(fragment)
    )
    low, high = context.value_range(dict(holdings.shares))
    return holdings.cash + low, holdings.cash + high
