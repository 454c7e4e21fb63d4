"""Built-in trader templates.

These are the exploiters the engine ships with: a theorem buyer that bids up
efficiently generated theorems (and sells the disprovable stream down), an
oscillation arbitrageur that buys below and sells above the recent price
window, a complement arbitrageur holding each pair's prices to a sum of one,
and a reflection arbitrageur trading reflective atoms against the live price
feature they record. All demands are piecewise linear with capped size, so
each has an exact zero set the price search can land on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from ..deduction import DiagonalRule, PriceFactRule, ReflectiveRule
from ..logic import Not, Sentence
from ..trading.features import (
    Clamp,
    Const,
    FeatureExpr,
    MaxOf,
    MinOf,
    Neg,
    Price,
    Prod,
    Sum,
    const,
)
from ..trading.traders import Trader, TemplateRow

ONE = Fraction(1)
ZERO = Fraction(0)


def _minus(left: FeatureExpr, right: FeatureExpr) -> FeatureExpr:
    return Sum(left, Neg(right))


def _scaled(expr: FeatureExpr, factor: Fraction) -> FeatureExpr:
    return Prod(expr, Const(factor))


def _buy_below(sentence: Sentence, threshold: Fraction, slope: Fraction, cap: Fraction) -> FeatureExpr:
    # Positive demand when the price sits below the threshold, zero at and above it.
    gap = _minus(Const(threshold), Price(sentence, 0))
    return Clamp(_scaled(gap, slope), ZERO, cap)


def _sell_above(sentence: Sentence, threshold: Fraction, slope: Fraction, cap: Fraction) -> FeatureExpr:
    gap = _minus(Price(sentence, 0), Const(threshold))
    return Neg(Clamp(_scaled(gap, slope), ZERO, cap))


def _chase(sentence: Sentence, target: FeatureExpr, slope: Fraction, cap: Fraction) -> FeatureExpr:
    # Buys when the price is under the target value, sells above; zero exactly at it.
    gap = _minus(target, Price(sentence, 0))
    return Clamp(_scaled(gap, slope), -cap, cap)


def _band_indicator(
    sentence: Sentence, low: Fraction, high: Fraction, edge_slope: Fraction
) -> FeatureExpr:
    """Roughly 1 when the sentence's current price sits inside (low, high),
    0 outside, linear on an edge margin of width 1/edge_slope."""
    parts = []
    if low > 0:
        parts.append(
            Clamp(_scaled(_minus(Price(sentence, 0), Const(low)), edge_slope), ZERO, ONE)
        )
    if high < 1:
        parts.append(
            Clamp(_scaled(_minus(Const(high), Price(sentence, 0)), edge_slope), ZERO, ONE)
        )
    if not parts:
        return const(1)
    if len(parts) == 1:
        return parts[0]
    return Prod(parts[0], parts[1])


def theorem_buyer(
    theorem_family: Callable[[int], Sentence],
    disproof_family: Callable[[int], Sentence] | None = None,
    *,
    buy_below: Fraction = Fraction(15, 16),
    sell_above: Fraction = Fraction(1, 16),
    slope: Fraction = Fraction(64),
    cap: Fraction = Fraction(1, 16),
    name: str = "theorem_buyer",
) -> Trader:
    """Buys the day's streamed theorem whenever it trades below ``buy_below``
    and sells the day's disprovable sentence above ``sell_above``."""

    def template(day: int) -> list[TemplateRow]:
        rows = [(theorem_family(day), _buy_below(theorem_family(day), buy_below, slope, cap))]
        if disproof_family is not None:
            rows.append(
                (disproof_family(day), _sell_above(disproof_family(day), sell_above, slope, cap))
            )
        return rows

    return Trader(name, template)


def oscillation_arbitrageur(
    sentences: Sequence[Sentence],
    *,
    window: int = 10,
    slope: Fraction = Fraction(64),
    cap: Fraction = Fraction(1, 8),
    margin: Fraction = Fraction(1, 256),
    name: str = "oscillation",
) -> Trader:
    """Buys below and sells above the recent price window.

    The window extends by ``margin`` on each side, so a price that merely
    settled one grid step away from yesterday's range is left alone; without
    the margin, any other trader whose demand boundary sits just outside the
    window gets fought over an off-grid crossing forever.
    """
    if window < 1:
        raise ValueError("oscillation window must be >= 1")
    fixed = tuple(sentences)

    def template(day: int) -> list[TemplateRow]:
        rows = []
        for sentence in fixed:
            low: FeatureExpr = Price(sentence, 1)
            high: FeatureExpr = Price(sentence, 1)
            for back in range(2, window + 1):
                low = MinOf(low, Price(sentence, back))
                high = MaxOf(high, Price(sentence, back))
            low = _minus(low, Const(margin))
            high = Sum(high, Const(margin))
            buy = Clamp(_scaled(_minus(low, Price(sentence, 0)), slope), ZERO, cap)
            sell = Clamp(_scaled(_minus(Price(sentence, 0), high), slope), ZERO, cap)
            rows.append((sentence, Sum(buy, Neg(sell))))
        return rows

    return Trader(name, template)


def complement_arbitrageur(
    sentences: Sequence[Sentence],
    *,
    slope: Fraction = Fraction(64),
    cap: Fraction = Fraction(1, 8),
    name: str = "complement",
) -> Trader:
    """Trades each sentence and its negation toward prices summing to one."""
    fixed = tuple(sentences)

    def template(day: int) -> list[TemplateRow]:
        rows = []
        for sentence in fixed:
            negated = Not(sentence)
            gap = _minus(
                const(1), Sum(Price(sentence, 0), Price(negated, 0))
            )
            demand = Clamp(_scaled(gap, slope), -cap, cap)
            rows.append((sentence, demand))
            rows.append((negated, demand))
        return rows

    return Trader(name, template)


def reflection_arbitrageur(
    rules: Iterable[ReflectiveRule],
    *,
    slope: Fraction = Fraction(64),
    cap: Fraction = Fraction(1, 8),
    indicator_slope: Fraction = Fraction(16),
    stabilizer_cap: Fraction = Fraction(1, 16),
    name: str = "reflection",
) -> Trader:
    """Trades each reflective atom against the price feature that settles it.

    Diagonal atoms are chased toward their threshold, the only price at which
    the settled sentence cannot be exploited either way. Price-fact atoms are
    chased toward a continuous indicator of the target's current price lying
    inside the band. For deferred-observation rules (bin rules), the trader
    also quotes the recent targets at yesterday's price so the observation
    day still finds them priced.
    """
    fixed = tuple(rules)

    def template(day: int) -> list[TemplateRow]:
        rows: list[TemplateRow] = []
        stabilized: set[Sentence] = set()
        for rule in fixed:
            if isinstance(rule, DiagonalRule):
                atom = rule.sentence(day)
                rows.append((atom, _chase(atom, Const(rule.threshold), slope, cap)))
                continue
            assert isinstance(rule, PriceFactRule)
            atom = rule.sentence(day)
            watched = rule.target(day)
            indicator = _band_indicator(watched, rule.low, rule.high, indicator_slope)
            rows.append((atom, _chase(atom, indicator, slope, cap)))
            if rule.observe is not None:
                span = rule.observation_day(day) - day + rule.lag
                for back in range(1, span + 1):
                    earlier = day - back
                    if earlier < 1:
                        break
                    target = rule.target(earlier)
                    if target in stabilized:
                        continue
                    stabilized.add(target)
                    rows.append(
                        (target, _chase(target, Price(target, 1), slope, stabilizer_cap))
                    )
        return rows

    return Trader(name, template)
