"""Discrete logically-uncertain variables and their market expectations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ..errors import ConfigError
from ..logic import (
    Not,
    Sentence,
    TheoryFragment,
    atoms_of,
    eval_sentence,
    iter_plausible_worlds,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class Variable:
    """A finite-valued variable given by a sentence partition.

    Each (sentence, value) pair says the variable takes ``value`` exactly
    when the sentence is true. Whether the sentences really partition truth
    is relative to the scenario's deductive closure; ``check_partition``
    verifies it propositionally where that is decidable.
    """

    partition: tuple[tuple[Sentence, Fraction], ...]

    def __post_init__(self) -> None:
        values = [v for _, v in self.partition]
        if len(set(values)) != len(values):
            raise ConfigError("variable partition values must be distinct")

    @classmethod
    def of(cls, pairs: Iterable[tuple[Sentence, Fraction]]) -> "Variable":
        return cls(tuple((s, Fraction(v)) for s, v in pairs))

    def check_partition(self, fragment: TheoryFragment) -> bool:
        """True iff every world plausible under the fragment satisfies exactly
        one partition sentence."""
        atoms = set(fragment.atoms)
        for sentence, _ in self.partition:
            atoms |= atoms_of(sentence)
        for world in iter_plausible_worlds(fragment, atoms):
            hits = sum(
                1 for sentence, _ in self.partition if eval_sentence(sentence, world)
            )
            if hits != 1:
                return False
        return True

    def scaled(self, factor: Fraction, shift: Fraction = ZERO) -> "Variable":
        return Variable(
            tuple((s, factor * v + shift) for s, v in self.partition)
        )


def indicator(sentence: Sentence) -> Variable:
    """The variable worth 1 when the sentence is true and 0 otherwise."""
    return Variable(((sentence, Fraction(1)), (Not(sentence), ZERO)))


def expectation(pricing: Mapping[Sentence, Fraction], variable: Variable) -> Fraction:
    """Sum of value times market price over the partition; unpriced partition
    sentences read as 0."""
    total = ZERO
    for sentence, value in variable.partition:
        total += value * pricing.get(sentence, ZERO)
    return total


@dataclass(frozen=True)
class DeferralFunction:
    """A day map pointing strictly into the future: f(n) > n for all n."""

    fn: Callable[[int], int]

    def __call__(self, day: int) -> int:
        value = self.fn(day)
        if value <= day:
            raise ConfigError(f"deferral function must satisfy f(n) > n, got f({day}) = {value}")
        return value


def affine_day_map(text: str) -> Callable[[int], int]:
    """Parse day maps of the shape ``a*n + b`` written like 4n, n+10, 2n+3, 12."""
    compact = text.replace(" ", "")
    slope, offset = 0, 0
    try:
        if "n" in compact:
            head, _, tail = compact.partition("n")
            slope = int(head) if head else 1
            if tail:
                if not tail.startswith("+"):
                    raise ConfigError(f"bad day map {text!r}")
                offset = int(tail[1:])
        else:
            offset = int(compact)
    except ValueError as exc:
        raise ConfigError(f"bad day map {text!r}") from exc
    if slope < 0 or offset < 0 or (slope == 0 and offset == 0):
        raise ConfigError(f"bad day map {text!r}")

    def mapping(day: int) -> int:
        return slope * day + offset

    return mapping
