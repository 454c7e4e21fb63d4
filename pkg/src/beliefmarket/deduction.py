"""Deductive processes: nested generators of finite trusted-sentence sets.

Scripted processes replay a text file. Stream processes emit day-indexed
sentence families once a delay map says the underlying fact is confirmed;
a bounded program interpreter backs the halting-pattern families. Reflective
rules settle fresh atoms according to the market's own recorded past prices,
which is how sentences about the market enter the trusted theory without
any circularity through the current day.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import ConfigError, EvaluationError, InconsistentFragmentError, NestednessError, ScriptError
from .logic import (
    Atom,
    Not,
    Sentence,
    TheoryFragment,
    is_consistent,
    parse_sentence,
    render,
)

ZERO = Fraction(0)


class DeductiveProcess:
    """Day-indexed producer of nested finite theory fragments.

    ``step`` memoizes, enforces nestedness against the previous day, and
    halts with an error on a propositionally inconsistent fragment.
    """

    provenance = "generated"

    def __init__(self) -> None:
        self._cache: dict[int, TheoryFragment] = {}

    def _generate(self, day: int) -> Iterable[Sentence]:
        raise NotImplementedError

    def step(self, day: int) -> TheoryFragment:
        if day < 1:
            raise ValueError(f"day index must be >= 1, got {day}")
        cached = self._cache.get(day)
        if cached is not None:
            return cached
        current = frozenset(self._generate(day))
        if day > 1:
            previous = self.step(day - 1)
            for sentence in previous:
                if sentence not in current:
                    raise NestednessError(day, render(sentence))
        fragment = TheoryFragment(current)
        if not is_consistent(fragment):
            raise InconsistentFragmentError(
                f"deductive process produced an inconsistent fragment at day {day}", day
            )
        self._cache[day] = fragment
        return fragment


def step(process: DeductiveProcess, day: int) -> TheoryFragment:
    """Functional form of :meth:`DeductiveProcess.step`."""
    return process.step(day)


class ScriptedProcess(DeductiveProcess):
    """Replays explicit per-day additions; absent days repeat the previous set."""

    provenance = "scripted"

    def __init__(self, additions: Mapping[int, Iterable[Sentence]]):
        super().__init__()
        cleaned: dict[int, frozenset[Sentence]] = {}
        for day, sentences in additions.items():
            if day < 1:
                raise ConfigError(f"script day must be >= 1, got {day}")
            cleaned[day] = frozenset(sentences)
        self._additions = cleaned

    def _generate(self, day: int) -> Iterable[Sentence]:
        out: set[Sentence] = set()
        for when, sentences in self._additions.items():
            if when <= day:
                out |= sentences
        return out


_SCRIPT_LINE = re.compile(r"day\s+(\d+)\s*:\s*(.+?)\s*\Z")


def parse_script(text: str, source: str = "<script>") -> ScriptedProcess:
    """Parse the line-oriented script format: ``day <n>: <sentence>``."""
    additions: dict[int, set[Sentence]] = {}
    last_day = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SCRIPT_LINE.match(line)
        if match is None:
            raise ScriptError(f"{source}:{lineno}: expected 'day <n>: <sentence>'")
        day = int(match.group(1))
        if day < last_day:
            raise ScriptError(
                f"{source}:{lineno}: non-monotone script, day {day} after day {last_day}"
            )
        last_day = day
        try:
            sentence = parse_sentence(match.group(2))
        except Exception as exc:
            raise ScriptError(f"{source}:{lineno}: {exc}") from exc
        additions.setdefault(day, set()).add(sentence)
    return ScriptedProcess(additions)


def load_script(path: Union[str, Path]) -> ScriptedProcess:
    """Load a scripted deductive process from a file."""
    path = Path(path)
    return parse_script(path.read_text(), source=str(path))


@dataclass(frozen=True)
class SentenceStream:
    """A day-indexed sentence family confirmed with a delay.

    ``family(k)`` is the k-th sentence; it (or its negation, when ``negate``)
    enters the theory on day ``delay(k)``. ``include`` gates which indices
    are ever confirmed, which is how interpreter-backed halting streams skip
    machines the bounded run could not decide.
    """

    family: Callable[[int], Sentence]
    delay: Callable[[int], int]
    negate: bool = False
    include: Optional[Callable[[int], bool]] = None

    def confirmed(self, day: int) -> Iterable[Sentence]:
        for index in range(1, day + 1):
            when = self.delay(index)
            if when < index:
                raise ConfigError(
                    f"stream delay must satisfy f(k) >= k, got f({index}) = {when}"
                )
            if when > day:
                continue
            if self.include is not None and not self.include(index):
                continue
            sentence = self.family(index)
            yield Not(sentence) if self.negate else sentence


class StreamProcess(DeductiveProcess):
    """Union of sentence streams."""

    def __init__(self, streams: Sequence[SentenceStream]):
        super().__init__()
        self.streams = tuple(streams)

    def _generate(self, day: int) -> Iterable[Sentence]:
        out: set[Sentence] = set()
        for stream in self.streams:
            out.update(stream.confirmed(day))
        return out


def theorem_stream(
    family: Callable[[int], Sentence], delay: Callable[[int], int]
) -> StreamProcess:
    """Process whose day-m fragment is every family sentence with delay <= m."""
    return StreamProcess((SentenceStream(family, delay),))


class CompositeProcess(DeductiveProcess):
    """Pointwise union of several deductive processes."""

    provenance = "composite"

    def __init__(self, parts: Sequence[DeductiveProcess]):
        super().__init__()
        self.parts = tuple(parts)

    def _generate(self, day: int) -> Iterable[Sentence]:
        out: set[Sentence] = set()
        for part in self.parts:
            out |= part.step(day).sentences
        return out


# --------------------------------------------------------------------------
# Reflective rules: atoms settled by recorded market prices.
# --------------------------------------------------------------------------

_SLUG_MAP = {
    "~": "not_",
    "&": "and",
    "|": "or",
    "(": "",
    ")": "",
    " ": "_",
    "-": "",
    ">": "imp",
    "<": "if",
    "T": "top",
    "F": "bot",
}


def _slug(sentence: Sentence) -> str:
    text = render(sentence)
    out = []
    for char in text:
        out.append(_SLUG_MAP.get(char, char))
    return "".join(out)


def _rational_slug(value: Fraction) -> str:
    return f"{value.numerator}_{value.denominator}"


@dataclass(frozen=True)
class DiagonalRule:
    """Settles a fresh per-day atom by whether its own recorded price fell
    below the threshold on its day: the atom is confirmed true exactly when
    the market priced it under ``threshold``."""

    prefix: str
    threshold: Fraction
    lag: int = 1

    def __post_init__(self) -> None:
        if not (0 < self.threshold < 1):
            raise ConfigError("diagonal threshold must lie strictly inside (0, 1)")
        if self.lag < 1:
            raise ConfigError("reflective lag must be >= 1")

    def sentence(self, day: int) -> Atom:
        return Atom(f"{self.prefix}_{day}")


@dataclass(frozen=True)
class PriceFactRule:
    """Settles per-day atoms recording whether a target sentence's price fell
    inside a band.

    ``target(m)`` is the sentence observed for index m; ``observe(m)`` is the
    day whose recorded price decides it (defaults to m itself). The band is
    open on both ends unless ``include_low`` closes the lower end, which the
    bin rules need to tile [0, 1] without gaps.
    """

    target: Callable[[int], Sentence]
    low: Fraction
    high: Fraction
    lag: int = 1
    observe: Optional[Callable[[int], int]] = None
    include_low: bool = False
    name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.low >= self.high:
            raise ConfigError("price-fact band must have low < high")
        if self.lag < 1:
            raise ConfigError("reflective lag must be >= 1")

    def observation_day(self, index: int) -> int:
        day = self.observe(index) if self.observe is not None else index
        if day < index:
            raise ConfigError(
                f"observation day must be >= the index, got {day} for index {index}"
            )
        return day

    def sentence(self, index: int) -> Atom:
        if self.name is not None:
            return Atom(f"{self.name}_{index}")
        return Atom(
            f"pr_{index}_{_slug(self.target(index))}"
            f"_{_rational_slug(self.low)}_{_rational_slug(self.high)}"
        )

    def holds(self, price: Fraction) -> bool:
        above = price >= self.low if self.include_low else price > self.low
        return above and price < self.high


ReflectiveRule = Union[DiagonalRule, PriceFactRule]


def bin_rules(
    prefix: str,
    bins: int,
    target: Callable[[int], Sentence],
    observe: Callable[[int], int],
    lag: int = 1,
) -> tuple[PriceFactRule, ...]:
    """Price-fact rules tiling [0, 1] into ``bins`` half-open bands.

    The top band extends past 1 so a price of exactly 1 still lands in it.
    """
    if bins < 1:
        raise ConfigError("bin count must be >= 1")
    rules = []
    for j in range(bins):
        high = Fraction(j + 1, bins) if j < bins - 1 else Fraction(bins + 1, bins)
        rules.append(
            PriceFactRule(
                target=target,
                low=Fraction(j, bins),
                high=high,
                lag=lag,
                observe=observe,
                include_low=True,
                name=f"{prefix}{j}",
            )
        )
    return tuple(rules)


def reflective_extend(
    history: Sequence[Mapping[Sentence, Fraction]],
    rules: Iterable[ReflectiveRule],
    day: int,
) -> TheoryFragment:
    """Settled reflective facts available strictly before day ``day``'s prices.

    Only recorded prices of days <= day - lag are read, so the output never
    depends on the current day's pricing. Sentences never priced read as 0,
    matching the off-support pricing default.
    """
    settled: set[Sentence] = set()
    names_seen: dict[str, Sentence] = {}
    for rule in rules:
        if isinstance(rule, DiagonalRule):
            for m in range(1, day - rule.lag + 1):
                target = rule.sentence(m)
                if m > len(history):
                    raise EvaluationError(
                        f"reflective rule needs the day-{m} pricing, history covers "
                        f"{len(history)} day(s)"
                    )
                price = history[m - 1].get(target, ZERO)
                settled.add(target if price < rule.threshold else Not(target))
        elif isinstance(rule, PriceFactRule):
            for m in range(1, day + 1):
                observed = rule.observation_day(m)
                if observed > day - rule.lag:
                    continue
                if observed > len(history):
                    raise EvaluationError(
                        f"reflective rule needs the day-{observed} pricing, history "
                        f"covers {len(history)} day(s)"
                    )
                watched = rule.target(m)
                price = history[observed - 1].get(watched, ZERO)
                atom = rule.sentence(m)
                previous = names_seen.get(atom.name)
                if previous is not None and previous != watched:
                    raise ConfigError(
                        f"price-fact atom name collision on {atom.name!r}"
                    )
                names_seen[atom.name] = watched
                settled.add(atom if rule.holds(price) else Not(atom))
        else:
            raise ConfigError(f"unknown reflective rule {rule!r}")
    return TheoryFragment(frozenset(settled))


# --------------------------------------------------------------------------
# Bounded interpreter for a tiny register machine, used by halting streams.
# Instructions over integer registers r0, r1, ...:
#   ("inc", r)  ("dec", r)  ("jz", r, addr)  ("jmp", addr)  ("halt",)
# dec floors at zero; running past the end of the program halts.
# --------------------------------------------------------------------------

Instruction = tuple
Program = tuple[Instruction, ...]


def run_bounded(program: Program, input_value: int, max_steps: int) -> bool:
    """True iff the program, started with r0 = input, halts within max_steps."""
    registers: dict[int, int] = {0: input_value}
    pc = 0
    steps = 0
    while True:
        if pc >= len(program) or program[pc][0] == "halt":
            return True
        if steps >= max_steps:
            return False
        op = program[pc]
        kind = op[0]
        if kind == "inc":
            registers[op[1]] = registers.get(op[1], 0) + 1
            pc += 1
        elif kind == "dec":
            registers[op[1]] = max(0, registers.get(op[1], 0) - 1)
            pc += 1
        elif kind == "jz":
            pc = op[2] if registers.get(op[1], 0) == 0 else pc + 1
        elif kind == "jmp":
            pc = op[1]
        else:
            raise ConfigError(f"unknown instruction {op!r}")
        steps += 1


def countdown_program() -> Program:
    """Decrements r0 to zero then halts; reaches halt after 3*r0 + 1 steps."""
    return (("jz", 0, 3), ("dec", 0), ("jmp", 0), ("halt",))


def forever_program() -> Program:
    """A tight loop that never halts."""
    return (("jmp", 0),)
