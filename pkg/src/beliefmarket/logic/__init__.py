"""Propositional sentence algebra and plausible-world enumeration."""

from .syntax import (
    ATOM_NAME_RE,
    BOTTOM,
    TOP,
    And,
    Atom,
    Bottom,
    Iff,
    Implies,
    Not,
    Or,
    Sentence,
    Top,
    atoms_of,
    parse_sentence,
    render,
    sort_key,
)
from .worlds import (
    DEFAULT_WORLD_CAP,
    EMPTY_FRAGMENT,
    FragmentContext,
    TheoryFragment,
    World,
    eval_sentence,
    is_consistent,
    iter_plausible_worlds,
    plausible_worlds,
    simplify,
)

__all__ = [
    "ATOM_NAME_RE",
    "BOTTOM",
    "TOP",
    "And",
    "Atom",
    "Bottom",
    "Iff",
    "Implies",
    "Not",
    "Or",
    "Sentence",
    "Top",
    "atoms_of",
    "parse_sentence",
    "render",
    "sort_key",
    "DEFAULT_WORLD_CAP",
    "EMPTY_FRAGMENT",
    "FragmentContext",
    "TheoryFragment",
    "World",
    "eval_sentence",
    "is_consistent",
    "iter_plausible_worlds",
    "plausible_worlds",
    "simplify",
]
