"""The market maker: certified fixed-point pricing, day by day.

Each day the engine assembles the trusted fragment, collects the support
(every sentence an active trader touches plus the fragment itself), and
searches for a price vector at which the pool's aggregate trade has max
plausible world value at most the day's epsilon. The search is a damped
tatonnement: raise prices of net-bought sentences, lower net-sold ones,
halving a sentence's step whenever its demand flips sign or collapses to
zero, which bisects onto the demand boundary. Small supports fall back to
exhaustive per-coordinate grid sweeps. A day that cannot be certified at
the configured resolution raises instead of posting uncertified prices.

All prices are exact rationals on the resolution grid; every certificate is
re-checkable by brute-force world enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from ..deduction import DeductiveProcess, ReflectiveRule, reflective_extend
from ..errors import ConfigError, ResolutionFailureError
from ..logic import (
    DEFAULT_WORLD_CAP,
    Atom,
    FragmentContext,
    Sentence,
    TheoryFragment,
    atoms_of,
    simplify,
    sort_key,
)
from ..trading import (
    Holdings,
    Trade,
    apply_trade,
    instantiate_trade,
    price_references,
)
from .pool import TraderPool, scale_for_budget

Pricing = dict[Sentence, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def default_epsilon(resolution: Fraction) -> Callable[[int], Fraction]:
    """The default schedule 2**-n, floored at a quarter of the resolution."""
    floor = resolution / 4

    def epsilon(day: int) -> Fraction:
        return max(Fraction(1, 2**day), floor)

    return epsilon


@dataclass(frozen=True)
class InductorConfig:
    pool: TraderPool
    epsilon: Optional[Callable[[int], Fraction]] = None
    resolution: Fraction = Fraction(1, 1024)
    max_iterations: int = 600
    initial_price: Fraction = HALF
    world_cap: int = DEFAULT_WORLD_CAP

    def validate(self) -> None:
        if self.resolution <= 0 or self.resolution > 1:
            raise ConfigError(f"resolution must lie in (0, 1], got {self.resolution}")
        if (1 / self.resolution).denominator != 1:
            raise ConfigError(f"1/resolution must be an integer, got {self.resolution}")
        if not (0 <= self.initial_price <= 1):
            raise ConfigError(f"initial price must lie in [0, 1], got {self.initial_price}")
        if (self.initial_price / self.resolution).denominator != 1:
            raise ConfigError(
                f"initial price {self.initial_price} is not a multiple of the "
                f"resolution {self.resolution}"
            )
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")

    def epsilon_at(self, day: int) -> Fraction:
        schedule = self.epsilon or default_epsilon(self.resolution)
        value = schedule(day)
        if value <= 0:
            raise ConfigError(f"epsilon must be positive, got {value} at day {day}")
        return value


@dataclass(frozen=True)
class DayCertificate:
    """Per-day proof material: the posted pricing, the firm's aggregate trade
    at that pricing, its max plausible world value (<= epsilon), and the
    budget scale applied to each pool member (0 for inactive members)."""

    day: int
    epsilon: Fraction
    max_value: Fraction
    scales: tuple[Fraction, ...]
    pricing: Pricing
    firm_trade: Trade


@dataclass
class MarketTrace:
    """Day-indexed pricings plus their certificates.

    ``books_by_day`` holds each member's holdings after the day's executed
    trades; it is in-memory audit state, not part of the file formats.
    """

    pricings: list[Pricing] = field(default_factory=list)
    certificates: list[DayCertificate] = field(default_factory=list)
    books_by_day: list[list[Holdings]] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.pricings)

    def price(self, day: int, sentence: Sentence) -> Fraction:
        if not (1 <= day <= len(self.pricings)):
            raise ValueError(f"day {day} outside trace of {len(self.pricings)} day(s)")
        return self.pricings[day - 1].get(sentence, ZERO)

    def support(self, day: int) -> list[Sentence]:
        return sorted(self.pricings[day - 1], key=sort_key)


def support_sentences(
    pool: TraderPool, day: int, fragment: TheoryFragment
) -> tuple[Sentence, ...]:
    """Sentences to be priced: everything an active member's day template
    trades or reads, plus the fragment's sentences. Sorted canonically."""
    out: set[Sentence] = set(fragment.sentences)
    for index in range(pool.active_count(day)):
        member = pool.members[index]
        for sentence, expr in member.trader.day_template(day):
            out.add(sentence)
            out |= price_references(expr)
    return tuple(sorted(out, key=sort_key))


class _MemberValuator:
    """Per-day floor bookkeeping for one member's book.

    Splits the book into components the day's template cannot move (their
    floor is a day constant) and components coupled to template sentences,
    which are re-enumerated per candidate together with the trade.
    """

    def __init__(
        self,
        context: FragmentContext,
        holdings: Holdings,
        template_sentences: Iterable[Sentence],
    ):
        self.context = context
        self.cash = holdings.cash

        roots: dict[Atom, Atom] = {}

        def find(atom: Atom) -> Atom:
            parent = roots.setdefault(atom, atom)
            if parent == atom:
                return atom
            root = find(parent)
            roots[atom] = root
            return root

        def union(group: list[Atom]) -> None:
            for other in group[1:]:
                ra, rb = find(group[0]), find(other)
                if ra != rb:
                    roots[rb] = ra

        def free_atoms(sentence: Sentence) -> list[Atom]:
            return sorted(atoms_of(simplify(sentence, context.forced)), key=lambda a: a.name)

        groups: list[list[Atom]] = []
        for sentence, _ in holdings.shares:
            groups.append(free_atoms(sentence))
        template_atoms: set[Atom] = set()
        for sentence in template_sentences:
            atoms = free_atoms(sentence)
            template_atoms |= set(atoms)
            groups.append(atoms)
        for key in sorted(context._residual_groups, key=lambda a: a.name):
            members: set[Atom] = set()
            for sentence in context._residual_groups[key]:
                members |= atoms_of(sentence)
            groups.append(sorted(members, key=lambda a: a.name))
        for group in groups:
            if group:
                union(group)

        dynamic_roots = {find(atom) for atom in template_atoms}
        static_positions: dict[Sentence, Fraction] = {}
        dynamic_positions: dict[Sentence, Fraction] = {}
        for sentence, quantity in holdings.shares:
            atoms = free_atoms(sentence)
            if atoms and find(atoms[0]) in dynamic_roots:
                dynamic_positions[sentence] = quantity
            else:
                static_positions[sentence] = quantity
        self._dynamic_book = dynamic_positions
        self._static_low = context.value_range(static_positions)[0]
        self.worst_now = (
            self.cash + self._static_low + context.value_range(dynamic_positions)[0]
        )

    def floor_with(self, trade: Trade) -> Fraction:
        """Min plausible value of the book plus the (unscaled) trade."""
        merged = dict(self._dynamic_book)
        for sentence, quantity in trade.shares:
            merged[sentence] = merged.get(sentence, ZERO) + quantity
        low = self.context.value_range(merged)[0]
        return self.cash + trade.cash + self._static_low + low


@dataclass
class _Candidate:
    pricing: Pricing
    member_trades: list[Trade]
    scales: list[Fraction]
    firm: Trade
    value: Fraction


def _aggregate(
    members, member_trades: Sequence[Trade], scales: Sequence[Fraction]
) -> Trade:
    shares: dict[Sentence, Fraction] = {}
    cash = ZERO
    for member, trade, scale in zip(members, member_trades, scales):
        factor = member.weight * scale
        if factor == 0:
            continue
        for sentence, quantity in trade.shares:
            shares[sentence] = shares.get(sentence, ZERO) + factor * quantity
        cash += factor * trade.cash
    return Trade.build(shares, cash)


def firm_trade(
    pool: TraderPool,
    candidate: Pricing,
    history: Sequence[Pricing],
    day: int,
    fragment: TheoryFragment | FragmentContext,
    books: Optional[Sequence[Holdings]] = None,
) -> Trade:
    """The pool's aggregate trade at a candidate pricing: the weighted sum of
    every active member's budget-scaled template trade."""
    context = (
        fragment if isinstance(fragment, FragmentContext) else FragmentContext(fragment)
    )
    active = pool.active_count(day)
    if books is None:
        books = [Holdings.empty()] * len(pool.members)
    extended = list(history) + [candidate]
    trades: list[Trade] = []
    scales: list[Fraction] = []
    for index in range(active):
        member = pool.members[index]
        trade = instantiate_trade(member.trader, extended, day)
        valuator = _MemberValuator(
            context, books[index], [s for s, _ in trade.shares]
        )
        scale = scale_for_budget(
            valuator.worst_now, valuator.floor_with(trade), member.budget
        )
        trades.append(trade)
        scales.append(scale)
    return _aggregate(pool.members[:active], trades, scales)


def _initial_step(resolution: Fraction) -> Fraction:
    step = resolution
    while step * 2 <= Fraction(1, 8):
        step *= 2
    return step


class _Seeker:
    """Per-sentence price controller for the tatonnement.

    Marches in the net-demand direction with a fixed step; once the demand
    vanishes or flips sign, the boundary is bracketed between the last
    same-sign point and the current one, and the controller bisects the
    bracket on the grid. It settles on the grid point just past the boundary
    (where demand is zero, so the sentence contributes nothing to the
    certificate). Cross effects from other sentences can revive demand at a
    settled point, which restarts the march with a halved step.
    """

    __slots__ = ("mode", "step", "march_dir", "need", "demand_side", "zero_side")

    def __init__(self, step: Fraction):
        self.mode = "idle"
        self.step = step
        self.march_dir = 0
        self.need = 0
        self.demand_side = ZERO
        self.zero_side = ZERO

    def _midpoint(self, resolution: Fraction) -> Fraction:
        low, high = sorted((self.demand_side, self.zero_side))
        lo_k = int(low / resolution)
        hi_k = int(high / resolution)
        mid_k = (lo_k + hi_k) // 2
        if mid_k == lo_k:
            mid_k += 1
        return resolution * mid_k

    def propose(self, price: Fraction, quantity: Fraction, resolution: Fraction) -> Fraction:
        sign = 1 if quantity > 0 else (-1 if quantity < 0 else 0)
        if self.mode in ("idle", "settled"):
            if sign == 0:
                return price
            if self.mode == "settled":
                self.step = max(resolution, self.step / 2)
            self.mode = "march"
            self.march_dir = sign
            return min(ONE, max(ZERO, price + sign * self.step))
        if self.mode == "march":
            if sign == self.march_dir:
                moved = min(ONE, max(ZERO, price + sign * self.step))
                if moved == price:
                    # Pinned against 0 or 1 with one-sided demand; the
                    # contribution there is zero, so rest.
                    self.mode = "settled"
                return moved
            previous = price - self.march_dir * self.step
            previous = min(ONE, max(ZERO, previous))
            if previous == price:
                # The march was pinned against 0 or 1; treat as settled.
                self.mode = "settled"
                return price
            self.mode = "bisect"
            self.need = self.march_dir
            self.demand_side = previous
            self.zero_side = price
            if abs(self.demand_side - self.zero_side) <= resolution:
                self.mode = "settled"
                return self.zero_side
            return self._midpoint(resolution)
        # bisect
        if sign == self.need:
            self.demand_side = price
        else:
            self.zero_side = price
        if abs(self.demand_side - self.zero_side) <= resolution:
            self.mode = "settled"
            return self.zero_side
        return self._midpoint(resolution)


def find_prices(
    pool: TraderPool,
    books: Sequence[Holdings],
    history: Sequence[Pricing],
    fragment: TheoryFragment | FragmentContext,
    epsilon: Fraction,
    config: InductorConfig,
    *,
    day: Optional[int] = None,
    support: Optional[Sequence[Sentence]] = None,
) -> tuple[Pricing, DayCertificate]:
    """Search for a pricing certified at ``epsilon`` for the day's firm trade.

    Starts from the previous day's prices (initial price for new sentences)
    and runs the damped tatonnement; when that exhausts its iteration budget
    and at most three sentences ever drew demand, falls back to exhaustive
    per-coordinate grid sweeps. Raises :class:`ResolutionFailureError` rather
    than posting an uncertified pricing.
    """
    n = day if day is not None else len(history) + 1
    context = (
        fragment if isinstance(fragment, FragmentContext) else FragmentContext(fragment, day=n)
    )
    frag_obj = context.fragment
    if support is None:
        support = support_sentences(pool, n, frag_obj)
    support = tuple(support)
    resolution = config.resolution
    active = pool.active_count(n)
    members = pool.members[:active]

    previous: Pricing = history[-1] if history else {}
    pricing: Pricing = {
        s: previous.get(s, config.initial_price) for s in support
    }

    valuators: list[_MemberValuator] = []
    templates: list[list] = []
    for index in range(active):
        template = members[index].trader.day_template(n)
        templates.append(template)
        valuators.append(
            _MemberValuator(context, books[index], [s for s, _ in template])
        )

    def evaluate(candidate: Pricing) -> _Candidate:
        extended = list(history) + [candidate]
        trades: list[Trade] = []
        scales: list[Fraction] = []
        for index in range(active):
            trade = instantiate_trade(members[index].trader, extended, n)
            scale = scale_for_budget(
                valuators[index].worst_now,
                valuators[index].floor_with(trade),
                members[index].budget,
            )
            trades.append(trade)
            scales.append(scale)
        firm = _aggregate(members, trades, scales)
        value = context.value_range(dict(firm.shares))[1] + firm.cash
        return _Candidate(candidate, trades, scales, firm, value)

    step0 = _initial_step(resolution)
    seekers: dict[Sentence, _Seeker] = {}
    touched: set[Sentence] = set()
    best_value: Optional[Fraction] = None

    def finish(result: _Candidate) -> tuple[Pricing, DayCertificate]:
        scales_full = list(result.scales) + [ZERO] * (len(pool.members) - active)
        certificate = DayCertificate(
            day=n,
            epsilon=epsilon,
            max_value=result.value,
            scales=tuple(scales_full),
            pricing=dict(result.pricing),
            firm_trade=result.firm,
        )
        return dict(result.pricing), certificate

    certified: Optional[_Candidate] = None
    for _ in range(config.max_iterations):
        result = evaluate(pricing)
        if best_value is None or result.value < best_value:
            best_value = result.value
        if result.value <= epsilon:
            certified = result
            # Accept once every controller has come to rest; mid-march
            # certificates would freeze prices deep inside flat demand
            # regions instead of at the boundary.
            if all(s.mode in ("idle", "settled") for s in seekers.values()):
                return finish(result)
        firm_shares = result.firm.shares_dict()
        moved = False
        for sentence in support:
            quantity = firm_shares.get(sentence, ZERO)
            seeker = seekers.get(sentence)
            if seeker is None:
                if quantity == 0:
                    continue
                seeker = _Seeker(step0)
                seekers[sentence] = seeker
            if quantity != 0:
                touched.add(sentence)
            proposed = seeker.propose(pricing[sentence], quantity, resolution)
            if proposed != pricing[sentence]:
                moved = True
                pricing = {**pricing, sentence: proposed}
        if not moved:
            break
    if certified is not None:
        return finish(certified)

    # Tatonnement exhausted. Exhaustive per-coordinate sweeps are feasible
    # only for small active supports.
    sweep_sentences = sorted(touched, key=sort_key)
    if sweep_sentences and len(sweep_sentences) <= 3:
        points = [resolution * k for k in range(int(1 / resolution) + 1)]
        current = evaluate(pricing)
        for _ in range(4):
            improved = False
            for sentence in sweep_sentences:
                best_local = current
                for point in points:
                    trial = evaluate({**current.pricing, sentence: point})
                    if trial.value < best_local.value:
                        best_local = trial
                if best_local is not current:
                    current = best_local
                    improved = True
                if current.value <= epsilon:
                    return finish(current)
            if not improved:
                break
        if current.value <= epsilon:
            return finish(current)
        best_value = min(best_value, current.value) if best_value is not None else current.value

    raise ResolutionFailureError(n, best_value, epsilon)


def run_inductor(
    config: InductorConfig,
    deduction: DeductiveProcess,
    reflective_rules: Sequence[ReflectiveRule] = (),
    horizon: int = 1,
) -> MarketTrace:
    """Run the full day loop for days 1..horizon.

    Each day: deduce, settle reflective facts from recorded prices, price the
    support with a certificate, execute every member's scaled trade at the
    posted pricing, and record the pricing and certificate. The loop is
    deterministic end to end.
    """
    config.validate()
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    pool = config.pool
    books: list[Holdings] = [Holdings.empty() for _ in pool.members]
    trace = MarketTrace()
    previous_epsilon: Optional[Fraction] = None
    for day in range(1, horizon + 1):
        scripted = deduction.step(day)
        reflected = reflective_extend(trace.pricings, reflective_rules, day)
        fragment = scripted | reflected
        context = FragmentContext(fragment, day=day, world_cap=config.world_cap)
        epsilon = config.epsilon_at(day)
        if previous_epsilon is not None and epsilon > previous_epsilon:
            raise ConfigError(
                f"epsilon schedule must be nonincreasing, got {epsilon} after "
                f"{previous_epsilon}"
            )
        previous_epsilon = epsilon
        support = support_sentences(pool, day, fragment)
        pricing, certificate = find_prices(
            pool,
            books,
            trace.pricings,
            context,
            epsilon,
            config,
            day=day,
            support=support,
        )
        extended = list(trace.pricings) + [pricing]
        for index in range(pool.active_count(day)):
            scale = certificate.scales[index]
            if scale == 0:
                continue
            trade = instantiate_trade(pool.members[index].trader, extended, day)
            executed = trade.scaled(scale)
            if executed.is_zero:
                continue
            books[index] = apply_trade(books[index], executed)
        trace.pricings.append(pricing)
        trace.certificates.append(certificate)
        trace.books_by_day.append(list(books))
    return trace
