"""Trading-feature expressions: continuous functions of market prices.

Expressions build from rational constants, the day index ``n``, and possibly
lagged prices via sum, product, negation, max, min, and clamp. Division is
excluded, so every expression is total and Lipschitz-continuous in the
current day's prices by construction. Price references look back only
(``price(s, k)`` reads day n - k); days before day 1 read 1/2, and sentences
missing from a day's pricing read 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from ..errors import EvaluationError, StrategyError
from ..logic import Sentence, parse_sentence

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class DayIndex:
    """The current day index ``n``."""


@dataclass(frozen=True)
class Price:
    sentence: Sentence
    offset: int = 0

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise StrategyError(
                f"future price reference: offset {self.offset} is negative"
            )


@dataclass(frozen=True)
class Sum:
    left: "FeatureExpr"
    right: "FeatureExpr"


@dataclass(frozen=True)
class Prod:
    left: "FeatureExpr"
    right: "FeatureExpr"


@dataclass(frozen=True)
class Neg:
    operand: "FeatureExpr"


@dataclass(frozen=True)
class MaxOf:
    left: "FeatureExpr"
    right: "FeatureExpr"


@dataclass(frozen=True)
class MinOf:
    left: "FeatureExpr"
    right: "FeatureExpr"


Bound = Union[Fraction, DayIndex]


@dataclass(frozen=True)
class Clamp:
    operand: "FeatureExpr"
    low: Bound
    high: Bound


FeatureExpr = Union[Const, DayIndex, Price, Sum, Prod, Neg, MaxOf, MinOf, Clamp]

N = DayIndex()


def const(value) -> Const:
    return Const(Fraction(value))


def _bound_value(bound: Bound, day: int) -> Fraction:
    if isinstance(bound, DayIndex):
        return Fraction(day)
    return bound


def eval_feature(
    expr: FeatureExpr,
    history: Sequence[Mapping[Sentence, Fraction]],
    day: int,
) -> Fraction:
    """Exact value at ``day`` given pricings for days 1..day (day last)."""
    if day < 1:
        raise EvaluationError(f"day index must be >= 1, got {day}")
    if day > len(history):
        raise EvaluationError(
            f"history covers {len(history)} day(s), cannot evaluate day {day}"
        )
    return _eval(expr, history, day)


def _eval(expr, history, day) -> Fraction:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, DayIndex):
        return Fraction(day)
    if isinstance(expr, Price):
        when = day - expr.offset
        if when < 1:
            return HALF
        return history[when - 1].get(expr.sentence, ZERO)
    if isinstance(expr, Sum):
        return _eval(expr.left, history, day) + _eval(expr.right, history, day)
    if isinstance(expr, Prod):
        return _eval(expr.left, history, day) * _eval(expr.right, history, day)
    if isinstance(expr, Neg):
        return -_eval(expr.operand, history, day)
    if isinstance(expr, MaxOf):
        return max(_eval(expr.left, history, day), _eval(expr.right, history, day))
    if isinstance(expr, MinOf):
        return min(_eval(expr.left, history, day), _eval(expr.right, history, day))
    if isinstance(expr, Clamp):
        low = _bound_value(expr.low, day)
        high = _bound_value(expr.high, day)
        if low > high:
            raise EvaluationError(f"clamp bounds inverted at day {day}: {low} > {high}")
        value = _eval(expr.operand, history, day)
        return min(high, max(low, value))
    raise TypeError(f"not a feature expression: {expr!r}")


def price_references(expr: FeatureExpr) -> frozenset[Sentence]:
    """Every sentence whose price the expression reads, at any offset."""
    if isinstance(expr, Price):
        return frozenset((expr.sentence,))
    if isinstance(expr, (Const, DayIndex)):
        return frozenset()
    if isinstance(expr, (Neg, Clamp)):
        return price_references(expr.operand)
    return price_references(expr.left) | price_references(expr.right)


def day_degree(expr: FeatureExpr) -> int:
    """Polynomial degree of the expression in the day index ``n``."""
    if isinstance(expr, DayIndex):
        return 1
    if isinstance(expr, (Const, Price)):
        return 0
    if isinstance(expr, Neg):
        return day_degree(expr.operand)
    if isinstance(expr, Clamp):
        return day_degree(expr.operand)
    if isinstance(expr, Prod):
        return day_degree(expr.left) + day_degree(expr.right)
    return max(day_degree(expr.left), day_degree(expr.right))


def validate_affine_day(expr: FeatureExpr) -> None:
    """Reject expressions that are superlinear in the day index."""
    if day_degree(expr) > 1:
        raise StrategyError("the day index n may only be used affinely")


def depth(expr: FeatureExpr) -> int:
    if isinstance(expr, (Const, DayIndex, Price)):
        return 1
    if isinstance(expr, (Neg, Clamp)):
        return 1 + depth(expr.operand)
    return 1 + max(depth(expr.left), depth(expr.right))


def value_bounds(expr: FeatureExpr, day: int) -> tuple[Fraction, Fraction]:
    """Interval bounds of the expression with all prices ranging over [0, 1]."""
    if isinstance(expr, Const):
        return expr.value, expr.value
    if isinstance(expr, DayIndex):
        return Fraction(day), Fraction(day)
    if isinstance(expr, Price):
        return ZERO, ONE
    if isinstance(expr, Sum):
        ll, lh = value_bounds(expr.left, day)
        rl, rh = value_bounds(expr.right, day)
        return ll + rl, lh + rh
    if isinstance(expr, Prod):
        ll, lh = value_bounds(expr.left, day)
        rl, rh = value_bounds(expr.right, day)
        corners = (ll * rl, ll * rh, lh * rl, lh * rh)
        return min(corners), max(corners)
    if isinstance(expr, Neg):
        low, high = value_bounds(expr.operand, day)
        return -high, -low
    if isinstance(expr, MaxOf):
        ll, lh = value_bounds(expr.left, day)
        rl, rh = value_bounds(expr.right, day)
        return max(ll, rl), max(lh, rh)
    if isinstance(expr, MinOf):
        ll, lh = value_bounds(expr.left, day)
        rl, rh = value_bounds(expr.right, day)
        return min(ll, rl), min(lh, rh)
    if isinstance(expr, Clamp):
        low = _bound_value(expr.low, day)
        high = _bound_value(expr.high, day)
        il, ih = value_bounds(expr.operand, day)
        return min(high, max(low, il)), min(high, max(low, ih))
    raise TypeError(f"not a feature expression: {expr!r}")


def lipschitz_bound(expr: FeatureExpr, day: int) -> Fraction:
    """A Lipschitz constant in the sup-norm over the current day's prices.

    Clamp, max, and min are 1-Lipschitz in their operands; a product is
    bounded through the operands' interval magnitudes.
    """
    if isinstance(expr, (Const, DayIndex)):
        return ZERO
    if isinstance(expr, Price):
        return ONE if expr.offset == 0 else ZERO
    if isinstance(expr, Sum):
        return lipschitz_bound(expr.left, day) + lipschitz_bound(expr.right, day)
    if isinstance(expr, Prod):
        ll, lh = value_bounds(expr.left, day)
        rl, rh = value_bounds(expr.right, day)
        left_mag = max(abs(ll), abs(lh))
        right_mag = max(abs(rl), abs(rh))
        return left_mag * lipschitz_bound(expr.right, day) + right_mag * lipschitz_bound(
            expr.left, day
        )
    if isinstance(expr, Neg):
        return lipschitz_bound(expr.operand, day)
    if isinstance(expr, (MaxOf, MinOf)):
        return max(lipschitz_bound(expr.left, day), lipschitz_bound(expr.right, day))
    if isinstance(expr, Clamp):
        return lipschitz_bound(expr.operand, day)
    raise TypeError(f"not a feature expression: {expr!r}")


# --------------------------------------------------------------------------
# Feature-expression parser. Also accepts binary minus as sugar for adding a
# negation, and decimal or a/b rational literals.
# --------------------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise StrategyError(f"expected {char!r}", self.pos)
        self.pos += 1

    def try_consume(self, char: str) -> bool:
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start : self.pos]

    def number(self) -> Fraction:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isdigit() or self.text[self.pos] == "."
        ):
            self.pos += 1
        if self.pos == start:
            raise StrategyError("expected a number", self.pos)
        numerator = self.text[start : self.pos]
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            den_start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == den_start:
                raise StrategyError("expected a denominator", self.pos)
            return Fraction(numerator) / Fraction(self.text[den_start : self.pos])
        return Fraction(numerator)


def _parse_bound(scanner: _Scanner) -> Bound:
    scanner.skip_ws()
    negative = scanner.try_consume("-")
    if scanner.peek() == "n":
        saved = scanner.pos
        word = scanner.word()
        if word == "n":
            if negative:
                raise StrategyError("clamp bound cannot be -n", saved)
            return N
        scanner.pos = saved
        raise StrategyError(f"unexpected word {word!r} in clamp bound", saved)
    value = scanner.number()
    return -value if negative else value


def _parse_expr(scanner: _Scanner) -> FeatureExpr:
    left = _parse_term(scanner)
    while True:
        char = scanner.peek()
        if char == "+":
            scanner.pos += 1
            left = Sum(left, _parse_term(scanner))
        elif char == "-":
            scanner.pos += 1
            left = Sum(left, Neg(_parse_term(scanner)))
        else:
            return left


def _parse_term(scanner: _Scanner) -> FeatureExpr:
    left = _parse_factor(scanner)
    while scanner.peek() == "*":
        scanner.pos += 1
        left = Prod(left, _parse_factor(scanner))
    return left


def _parse_factor(scanner: _Scanner) -> FeatureExpr:
    char = scanner.peek()
    if char == "-":
        scanner.pos += 1
        return Neg(_parse_factor(scanner))
    return _parse_primary(scanner)


def _parse_price(scanner: _Scanner) -> Price:
    scanner.expect("(")
    # The sentence text runs to the last comma before the balancing paren;
    # sentence syntax itself contains no commas.
    depth_count = 1
    start = scanner.pos
    pos = scanner.pos
    while pos < len(scanner.text):
        char = scanner.text[pos]
        if char == "(":
            depth_count += 1
        elif char == ")":
            depth_count -= 1
            if depth_count == 0:
                break
        pos += 1
    if depth_count != 0:
        raise StrategyError("unterminated price(...)", start)
    inner = scanner.text[start:pos]
    if "," not in inner:
        raise StrategyError("price(...) needs a sentence and an offset", start)
    sentence_text, offset_text = inner.rsplit(",", 1)
    try:
        sentence = parse_sentence(sentence_text)
    except Exception as exc:
        raise StrategyError(f"bad sentence in price(...): {exc}", start) from exc
    offset_text = offset_text.strip()
    try:
        offset = int(offset_text)
    except ValueError:
        raise StrategyError(f"bad price offset {offset_text!r}", start) from None
    scanner.pos = pos + 1
    if offset < 0:
        raise StrategyError(f"future price reference: offset {offset}", start)
    return Price(sentence, offset)


def _parse_primary(scanner: _Scanner) -> FeatureExpr:
    char = scanner.peek()
    if char == "(":
        scanner.pos += 1
        inner = _parse_expr(scanner)
        scanner.expect(")")
        return inner
    if char.isdigit() or char == ".":
        return Const(scanner.number())
    if char.isalpha():
        at = scanner.pos
        word = scanner.word()
        if word == "n":
            return N
        if word == "price":
            return _parse_price(scanner)
        if word in ("max", "min"):
            scanner.expect("(")
            left = _parse_expr(scanner)
            scanner.expect(",")
            right = _parse_expr(scanner)
            scanner.expect(")")
            return MaxOf(left, right) if word == "max" else MinOf(left, right)
        if word == "clamp":
            scanner.expect("(")
            operand = _parse_expr(scanner)
            scanner.expect(",")
            low = _parse_bound(scanner)
            scanner.expect(",")
            high = _parse_bound(scanner)
            scanner.expect(")")
            if isinstance(low, Fraction) and isinstance(high, Fraction) and low > high:
                raise StrategyError(f"clamp bounds inverted: {low} > {high}", at)
            return Clamp(operand, low, high)
        raise StrategyError(f"unknown name {word!r}", at)
    raise StrategyError(
        "expected a number, n, price(...), max, min, clamp, or parentheses",
        scanner.pos,
    )


def parse_feature(text: str) -> FeatureExpr:
    """Parse a feature expression, validating day-index affinity."""
    scanner = _Scanner(text)
    expr = _parse_expr(scanner)
    scanner.skip_ws()
    if scanner.pos != len(scanner.text):
        raise StrategyError(
            f"trailing input {scanner.text[scanner.pos:]!r}", scanner.pos
        )
    validate_affine_day(expr)
    return expr
