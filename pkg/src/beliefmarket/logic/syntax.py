"""Propositional sentences: syntax trees, parsing, and canonical rendering.

Sentences are formulas over named atoms with connectives ~, &, |, ->, <->
and the constants T (top) and F (bottom). Canonical rendering parenthesizes
every binary connective, so structurally distinct trees render to distinct
strings and ``parse_sentence(render(s)) == s`` holds for every tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from ..errors import SentenceSyntaxError

ATOM_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    """A propositional symbol; equality is by name."""

    name: str

    def __post_init__(self) -> None:
        if not ATOM_NAME_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Top:
    """The constant true sentence."""


@dataclass(frozen=True)
class Bottom:
    """The constant false sentence."""


@dataclass(frozen=True)
class Not:
    operand: "Sentence"


@dataclass(frozen=True)
class And:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Or:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Implies:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Iff:
    left: "Sentence"
    right: "Sentence"


Sentence = Union[Atom, Top, Bottom, Not, And, Or, Implies, Iff]

TOP = Top()
BOTTOM = Bottom()

_BINARY_GLYPH = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


@lru_cache(maxsize=None)
def render(sentence: Sentence) -> str:
    """Canonical text of a sentence. Injective on structurally distinct trees."""
    if isinstance(sentence, Atom):
        return sentence.name
    if isinstance(sentence, Top):
        return "T"
    if isinstance(sentence, Bottom):
        return "F"
    if isinstance(sentence, Not):
        return "~" + render(sentence.operand)
    glyph = _BINARY_GLYPH[type(sentence)]
    return f"({render(sentence.left)} {glyph} {render(sentence.right)})"


def sort_key(sentence: Sentence) -> str:
    """Deterministic ordering key used wherever sentence order matters."""
    return render(sentence)


@lru_cache(maxsize=None)
def atoms_of(sentence: Sentence) -> frozenset[Atom]:
    """Exactly the atoms occurring in the sentence."""
    if isinstance(sentence, Atom):
        return frozenset((sentence,))
    if isinstance(sentence, (Top, Bottom)):
        return frozenset()
    if isinstance(sentence, Not):
        return atoms_of(sentence.operand)
    return atoms_of(sentence.left) | atoms_of(sentence.right)


_TOKEN_RE = re.compile(
    r"(?P<atom>[a-z][a-z0-9_]*)|(?P<top>T)|(?P<bottom>F)"
    r"|(?P<iff><->)|(?P<implies>->)|(?P<negate>~)|(?P<conj>&)|(?P<disj>\|)"
    r"|(?P<lpar>\()|(?P<rpar>\))"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    length = len(text)
    while pos < length:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise SentenceSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        assert kind is not None
        tokens.append(_Token(kind, match.group(), pos))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], text_length: int):
        self.tokens = tokens
        self.index = 0
        self.text_length = text_length

    def peek(self) -> _Token | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def advance(self) -> _Token:
        token = self.peek()
        if token is None:
            raise SentenceSyntaxError("unexpected end of input", self.text_length)
        self.index += 1
        return token

    def fail(self, token: _Token | None) -> SentenceSyntaxError:
        if token is None:
            return SentenceSyntaxError("unexpected end of input", self.text_length)
        return SentenceSyntaxError(f"syntax error at token {token.text!r}", token.position)

    # Precedence, loosest first: <->, ->, |, &, ~. The arrows associate to
    # the right; & and | to the left.
    def parse_iff(self) -> Sentence:
        left = self.parse_implies()
        token = self.peek()
        if token is not None and token.kind == "iff":
            self.advance()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> Sentence:
        left = self.parse_or()
        token = self.peek()
        if token is not None and token.kind == "implies":
            self.advance()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Sentence:
        left = self.parse_and()
        while True:
            token = self.peek()
            if token is None or token.kind != "disj":
                return left
            self.advance()
            left = Or(left, self.parse_and())

    def parse_and(self) -> Sentence:
        left = self.parse_unary()
        while True:
            token = self.peek()
            if token is None or token.kind != "conj":
                return left
            self.advance()
            left = And(left, self.parse_unary())

    def parse_unary(self) -> Sentence:
        token = self.peek()
        if token is not None and token.kind == "negate":
            self.advance()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Sentence:
        token = self.peek()
        if token is None:
            raise self.fail(None)
        if token.kind == "atom":
            self.advance()
            return Atom(token.text)
        if token.kind == "top":
            self.advance()
            return TOP
        if token.kind == "bottom":
            self.advance()
            return BOTTOM
        if token.kind == "lpar":
            self.advance()
            inner = self.parse_iff()
            closer = self.peek()
            if closer is None or closer.kind != "rpar":
                raise self.fail(closer)
            self.advance()
            return inner
        raise self.fail(token)


def parse_sentence(text: str) -> Sentence:
    """Parse sentence text, raising :class:`SentenceSyntaxError` on bad input."""
    if not text.strip():
        raise SentenceSyntaxError("empty input", 0)
    parser = _Parser(_tokenize(text), len(text))
    sentence = parser.parse_iff()
    trailing = parser.peek()
    if trailing is not None:
        raise parser.fail(trailing)
    return sentence
