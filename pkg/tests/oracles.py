"""Brute-force oracles the tests use to cross-check engine computations.

These deliberately share no code with the engine's enumeration: plain
product iteration over all assignments, filtered by direct evaluation.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from beliefmarket.logic import (
    And,
    Atom,
    Iff,
    Implies,
    Not,
    Or,
    TheoryFragment,
    World,
    atoms_of,
    eval_sentence,
)
from beliefmarket.trading import world_value


def brute_worlds(fragment: TheoryFragment, support) -> frozenset[World]:
    atoms = sorted(set(support), key=lambda a: a.name)
    out = set()
    for combo in itertools.product((False, True), repeat=len(atoms)):
        world = World.of(dict(zip(atoms, combo)))
        if all(eval_sentence(s, world) for s in fragment):
            out.add(world)
    return frozenset(out)


def brute_value_range(position, fragment: TheoryFragment):
    atoms = set(fragment.atoms)
    for sentence, _ in position.shares:
        atoms |= atoms_of(sentence)
    values = [world_value(position, w) for w in brute_worlds(fragment, atoms)]
    return min(values), max(values)


def random_sentence(rng: random.Random, atoms: list[Atom], depth: int):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_sentence(rng, atoms, depth - 1))
    left = random_sentence(rng, atoms, depth - 1)
    right = random_sentence(rng, atoms, depth - 1)
    return [And, Or, Implies, Iff][kind - 1](left, right)


def random_clause(rng: random.Random, atoms: list[Atom], width: int = 3):
    literals = []
    for atom in rng.sample(atoms, min(width, len(atoms))):
        literals.append(atom if rng.random() < 0.5 else Not(atom))
    clause = literals[0]
    for literal in literals[1:]:
        clause = Or(clause, literal)
    return clause


def random_fraction(rng: random.Random, denominator: int = 16) -> Fraction:
    return Fraction(rng.randrange(-3 * denominator, 3 * denominator), denominator)
