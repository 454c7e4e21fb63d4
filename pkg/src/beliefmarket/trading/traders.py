"""Traders: named day-indexed trading strategies.

A trader's day-n template is a list of (sentence, coefficient expression)
pairs; the coefficient evaluates to the signed number of shares bought at
the day's prices. Template size and expression depth are bounded by a
polynomial in n fixed at construction, the engine's stand-in for efficient
computability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

from ..errors import StrategyError
from ..logic import Sentence, parse_sentence
from .features import FeatureExpr, depth, parse_feature

TemplateRow = tuple[Sentence, FeatureExpr]


@dataclass
class Trader:
    name: str
    template: Callable[[int], Sequence[TemplateRow]]
    size_bound: tuple[int, int] = (512, 1)

    def day_template(self, day: int) -> list[TemplateRow]:
        """The day's template, checked against the size/depth bound c * n**k."""
        if day < 1:
            raise ValueError(f"day index must be >= 1, got {day}")
        rows = list(self.template(day))
        coeff, power = self.size_bound
        limit = coeff * day**power
        if len(rows) > limit:
            raise StrategyError(
                f"trader {self.name!r} template has {len(rows)} rows at day {day}, "
                f"bound is {limit}"
            )
        for _, expr in rows:
            if depth(expr) > limit:
                raise StrategyError(
                    f"trader {self.name!r} expression depth exceeds {limit} at day {day}"
                )
        return rows


def fixed_trader(name: str, rows: Sequence[TemplateRow]) -> Trader:
    """Trader with the same template every day."""
    frozen = tuple(rows)
    return Trader(name, lambda day: frozen)


def parse_strategy(text: str, source: str = "<strategy>") -> Trader:
    """Parse the strategy file grammar.

    Header line ``trader <name>``, then one line per traded sentence:
    ``"<sentence-text>" : <feature-expr>``. ``#`` starts a comment. Repeated
    sentences are allowed; their coefficients add when the trade executes.
    """
    name = None
    rows: list[TemplateRow] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "trader":
                raise StrategyError(f"{source}:{lineno}: expected header 'trader <name>'")
            name = parts[1]
            continue
        if not line.startswith('"'):
            raise StrategyError(f"{source}:{lineno}: expected a quoted sentence")
        closing = line.find('"', 1)
        if closing < 0:
            raise StrategyError(f"{source}:{lineno}: unterminated sentence quote")
        sentence_text = line[1:closing]
        rest = line[closing + 1 :].lstrip()
        if not rest.startswith(":"):
            raise StrategyError(f"{source}:{lineno}: expected ':' after the sentence")
        try:
            sentence = parse_sentence(sentence_text)
            expr = parse_feature(rest[1:].strip())
        except StrategyError as exc:
            raise StrategyError(f"{source}:{lineno}: {exc}") from exc
        except Exception as exc:
            raise StrategyError(f"{source}:{lineno}: {exc}") from exc
        rows.append((sentence, expr))
    if name is None:
        raise StrategyError(f"{source}: missing 'trader <name>' header")
    return fixed_trader(name, rows)


def load_strategy(path: Union[str, Path]) -> Trader:
    path = Path(path)
    return parse_strategy(path.read_text(), source=str(path))
