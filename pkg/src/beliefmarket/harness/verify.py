"""Independent re-verification of engine runs.

Certificates are re-checked by brute-force world enumeration, bypassing the
engine's component decomposition entirely; budget safety is re-checked from
the recorded book snapshots. Both are exact rational comparisons.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from ..deduction import reflective_extend
from ..errors import EngineError
from ..inductor import MarketTrace
from ..logic import (
    FragmentContext,
    TheoryFragment,
    atoms_of,
    iter_plausible_worlds,
)
from ..trading import Holdings, Trade, plausible_value_range, world_value
from .scenario import Scenario


class VerificationError(EngineError):
    """A recorded certificate or budget bound failed independent re-checking."""


def brute_force_value_range(
    position: Union[Trade, Holdings],
    fragment: TheoryFragment,
    cap: int = 1 << 22,
) -> tuple[Fraction, Fraction]:
    """Value extrema by plain enumeration of every plausible world."""
    atoms = set(fragment.atoms)
    for sentence, _ in position.shares:
        atoms |= atoms_of(sentence)
    lowest = None
    highest = None
    for world in iter_plausible_worlds(fragment, atoms, cap=cap):
        value = world_value(position, world)
        if lowest is None or value < lowest:
            lowest = value
        if highest is None or value > highest:
            highest = value
    if lowest is None or highest is None:
        raise VerificationError("fragment admits no plausible world")
    return lowest, highest


def day_fragment(scenario: Scenario, trace: MarketTrace, day: int) -> TheoryFragment:
    """The trusted fragment the engine used on the given day."""
    scripted = scenario.deduction.step(day)
    reflected = reflective_extend(
        trace.pricings[: day - 1], scenario.reflective_rules, day
    )
    return scripted | reflected


def verify_certificates(scenario: Scenario, trace: MarketTrace) -> None:
    """Re-check every day's certificate by brute-force world enumeration.

    The recorded max plausible value must equal the brute-force maximum of
    the recorded firm trade exactly and sit at or below the day's epsilon.
    """
    for certificate in trace.certificates:
        fragment = day_fragment(scenario, trace, certificate.day)
        _, high = brute_force_value_range(certificate.firm_trade, fragment)
        if high != certificate.max_value:
            raise VerificationError(
                f"day {certificate.day}: recorded max value {certificate.max_value} "
                f"!= brute-force {high}"
            )
        if certificate.max_value > certificate.epsilon:
            raise VerificationError(
                f"day {certificate.day}: certificate value {certificate.max_value} "
                f"exceeds epsilon {certificate.epsilon}"
            )


def verify_budget_safety(scenario: Scenario, trace: MarketTrace) -> None:
    """Every member's book must keep min plausible value >= -budget, daily."""
    members = scenario.config.pool.members
    for day, books in enumerate(trace.books_by_day, 1):
        fragment = day_fragment(scenario, trace, day)
        context = FragmentContext(fragment, day=day)
        for member, book in zip(members, books):
            floor = plausible_value_range(book, context)[0]
            if floor < -member.budget:
                raise VerificationError(
                    f"day {day}: member {member.trader.name!r} floor {floor} "
                    f"breaches budget {member.budget}"
                )


def verify_firm_value_bound(scenario: Scenario, trace: MarketTrace) -> Fraction:
    """The firm's cumulative holdings must have max plausible value at most
    the sum of the daily epsilons. Returns the final cumulative max."""
    firm = Holdings.empty()
    shares: dict = {}
    cash = Fraction(0)
    budget_sum = Fraction(0)
    for certificate in trace.certificates:
        budget_sum += certificate.epsilon
        for sentence, quantity in certificate.firm_trade.shares:
            shares[sentence] = shares.get(sentence, Fraction(0)) + quantity
        cash += certificate.firm_trade.cash
    from ..trading.book import _normalize

    firm = Holdings(_normalize(shares), cash)
    final_day = trace.horizon
    fragment = day_fragment(scenario, trace, final_day)
    context = FragmentContext(fragment, day=final_day)
    high = plausible_value_range(firm, context)[1]
    if high > budget_sum:
        raise VerificationError(
            f"firm cumulative max plausible value {high} exceeds sum of epsilons "
            f"{budget_sum}"
        )
    return high
