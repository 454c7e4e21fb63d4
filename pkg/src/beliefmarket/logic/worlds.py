"""Worlds, theory fragments, and plausible-world machinery.

A world is a total truth assignment over a finite atom set. The worlds
"plausible" under a theory fragment are those satisfying every sentence of
the fragment. Enumeration is backtracking search with unit propagation:
sentences are constant-folded under the partial assignment, literals that
surface are forced, and only genuinely free atoms branch.

:class:`FragmentContext` is the per-day workhorse. It propagates the
fragment once, verifies satisfiability, and then answers exact min/max
queries for weighted sentence positions by enumerating worlds independently
per connected component of the residual constraint graph. Components are
typically single atoms, so the cost stays linear even when a book holds
hundreds of sentences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from ..errors import (
    EnumerationCapError,
    InconsistentFragmentError,
    SupportError,
    UncoveredAtomError,
)
from .syntax import (
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
    render,
    sort_key,
)

DEFAULT_WORLD_CAP = 1 << 20

ZERO = Fraction(0)


@dataclass(frozen=True)
class World:
    """A total truth assignment over a finite atom set."""

    entries: tuple[tuple[str, bool], ...]
    _lookup: dict = field(default=None, compare=False, hash=False, repr=False)

    @classmethod
    def of(cls, assignment: Mapping) -> "World":
        items: list[tuple[str, bool]] = []
        for key, value in assignment.items():
            name = key.name if isinstance(key, Atom) else str(key)
            items.append((name, bool(value)))
        items.sort()
        for (a, _), (b, _) in zip(items, items[1:]):
            if a == b:
                raise ValueError(f"duplicate atom {a!r} in world assignment")
        return cls(tuple(items))

    def _table(self) -> dict:
        table = self._lookup
        if table is None:
            table = dict(self.entries)
            object.__setattr__(self, "_lookup", table)
        return table

    def truth(self, atom: Atom) -> bool:
        try:
            return self._table()[atom.name]
        except KeyError:
            raise UncoveredAtomError(atom.name) from None

    @property
    def atoms(self) -> frozenset[Atom]:
        return frozenset(Atom(name) for name, _ in self.entries)

    def as_dict(self) -> dict[str, bool]:
        return dict(self.entries)


def eval_sentence(sentence: Sentence, world: World) -> bool:
    """Classical truth value; raises :class:`UncoveredAtomError` on missing atoms."""
    if isinstance(sentence, Atom):
        return world.truth(sentence)
    if isinstance(sentence, Top):
        return True
    if isinstance(sentence, Bottom):
        return False
    if isinstance(sentence, Not):
        return not eval_sentence(sentence.operand, world)
    if isinstance(sentence, And):
        return eval_sentence(sentence.left, world) and eval_sentence(sentence.right, world)
    if isinstance(sentence, Or):
        return eval_sentence(sentence.left, world) or eval_sentence(sentence.right, world)
    if isinstance(sentence, Implies):
        return (not eval_sentence(sentence.left, world)) or eval_sentence(sentence.right, world)
    if isinstance(sentence, Iff):
        return eval_sentence(sentence.left, world) == eval_sentence(sentence.right, world)
    raise TypeError(f"not a sentence: {sentence!r}")


@dataclass(frozen=True)
class TheoryFragment:
    """A finite set of trusted sentences with set semantics."""

    sentences: frozenset[Sentence]

    @classmethod
    def of(cls, *sentences: Sentence) -> "TheoryFragment":
        return cls(frozenset(sentences))

    @classmethod
    def from_iterable(cls, sentences: Iterable[Sentence]) -> "TheoryFragment":
        return cls(frozenset(sentences))

    def __iter__(self) -> Iterator[Sentence]:
        return iter(sorted(self.sentences, key=sort_key))

    def __len__(self) -> int:
        return len(self.sentences)

    def __contains__(self, sentence: Sentence) -> bool:
        return sentence in self.sentences

    def __or__(self, other: "TheoryFragment") -> "TheoryFragment":
        return TheoryFragment(self.sentences | other.sentences)

    def issubset(self, other: "TheoryFragment") -> bool:
        return self.sentences <= other.sentences

    @property
    def atoms(self) -> frozenset[Atom]:
        out: frozenset[Atom] = frozenset()
        for sentence in self.sentences:
            out |= atoms_of(sentence)
        return out


EMPTY_FRAGMENT = TheoryFragment(frozenset())


def _negate(sentence: Sentence) -> Sentence:
    if isinstance(sentence, Top):
        return BOTTOM
    if isinstance(sentence, Bottom):
        return TOP
    if isinstance(sentence, Not):
        return sentence.operand
    return Not(sentence)


def simplify(sentence: Sentence, forced: Mapping[Atom, bool]) -> Sentence:
    """Constant-fold under a partial assignment.

    The result is TOP, BOTTOM, or a tree mentioning only unassigned atoms.
    Double negations collapse, so forced literals always surface as an Atom
    or a negated Atom.
    """
    if isinstance(sentence, Atom):
        value = forced.get(sentence)
        if value is None:
            return sentence
        return TOP if value else BOTTOM
    if isinstance(sentence, (Top, Bottom)):
        return sentence
    if isinstance(sentence, Not):
        return _negate(simplify(sentence.operand, forced))
    left = simplify(sentence.left, forced)
    right = simplify(sentence.right, forced)
    if isinstance(sentence, And):
        if isinstance(left, Bottom) or isinstance(right, Bottom):
            return BOTTOM
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return And(left, right)
    if isinstance(sentence, Or):
        if isinstance(left, Top) or isinstance(right, Top):
            return TOP
        if isinstance(left, Bottom):
            return right
        if isinstance(right, Bottom):
            return left
        return Or(left, right)
    if isinstance(sentence, Implies):
        if isinstance(left, Bottom) or isinstance(right, Top):
            return TOP
        if isinstance(left, Top):
            return right
        if isinstance(right, Bottom):
            return _negate(left)
        return Implies(left, right)
    if isinstance(sentence, Iff):
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        if isinstance(left, Bottom):
            return _negate(right)
        if isinstance(right, Bottom):
            return _negate(left)
        return Iff(left, right)
    raise TypeError(f"not a sentence: {sentence!r}")


def _propagate(
    sentences: Iterable[Sentence], forced: Optional[Mapping[Atom, bool]] = None
) -> Optional[tuple[dict[Atom, bool], list[Sentence]]]:
    """Unit propagation. Returns (forced assignment, non-literal residuals),
    or None when a contradiction is reached."""
    assignment: dict[Atom, bool] = dict(forced) if forced else {}
    residuals = list(sentences)
    changed = True
    while changed:
        changed = False
        remaining: list[Sentence] = []
        for sentence in residuals:
            reduced = simplify(sentence, assignment)
            if isinstance(reduced, Top):
                continue
            if isinstance(reduced, Bottom):
                return None
            if isinstance(reduced, Atom):
                assignment[reduced] = True
                changed = True
                continue
            if isinstance(reduced, Not) and isinstance(reduced.operand, Atom):
                assignment[reduced.operand] = False
                changed = True
                continue
            remaining.append(reduced)
        residuals = remaining
    return assignment, residuals


def _branch_atom(residuals: Sequence[Sentence]) -> Atom:
    candidates: set[Atom] = set()
    for sentence in residuals:
        candidates |= atoms_of(sentence)
    return min(candidates, key=lambda a: a.name)


def iter_plausible_worlds(
    fragment: TheoryFragment,
    support: Iterable[Atom],
    cap: Optional[int] = DEFAULT_WORLD_CAP,
) -> Iterator[World]:
    """Lazily yield every world over ``support`` satisfying the fragment.

    Atoms in the support unconstrained by the fragment take both values.
    Raises :class:`SupportError` if the support misses a fragment atom and
    :class:`EnumerationCapError` past ``cap`` yielded worlds.
    """
    support_atoms = sorted(set(support), key=lambda a: a.name)
    support_set = set(support_atoms)
    missing = fragment.atoms - support_set
    if missing:
        names = ", ".join(sorted(a.name for a in missing))
        raise SupportError(f"support does not cover fragment atoms: {names}")

    seeded = _propagate(fragment.sentences)
    if seeded is None:
        return
    count = 0

    def emit(assignment: dict[Atom, bool]) -> Iterator[World]:
        nonlocal count
        free = [a for a in support_atoms if a not in assignment]
        base = {a: v for a, v in assignment.items() if a in support_set}
        for combo in itertools.product((False, True), repeat=len(free)):
            count += 1
            if cap is not None and count > cap:
                raise EnumerationCapError(
                    f"more than {cap} plausible worlds over {len(support_atoms)} atoms"
                )
            world = dict(base)
            world.update(zip(free, combo))
            yield World.of(world)

    def search(state: tuple[dict[Atom, bool], list[Sentence]]) -> Iterator[World]:
        assignment, residuals = state
        if not residuals:
            yield from emit(assignment)
            return
        atom = _branch_atom(residuals)
        for value in (False, True):
            branched = _propagate(residuals, {**assignment, atom: value})
            if branched is not None:
                yield from search(branched)

    yield from search(seeded)


def plausible_worlds(
    fragment: TheoryFragment,
    support: Iterable[Atom],
    cap: Optional[int] = DEFAULT_WORLD_CAP,
) -> frozenset[World]:
    """All worlds over ``support`` satisfying every sentence of the fragment."""
    return frozenset(iter_plausible_worlds(fragment, support, cap))


def is_consistent(fragment: TheoryFragment) -> bool:
    """True iff some world over the fragment's own atoms satisfies it."""
    return next(iter_plausible_worlds(fragment, fragment.atoms, cap=None), None) is not None


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[Atom, Atom] = {}

    def find(self, item: Atom) -> Atom:
        parent = self.parent.setdefault(item, item)
        if parent is item or parent == item:
            return parent
        root = self.find(parent)
        self.parent[item] = root
        return root

    def union(self, a: Atom, b: Atom) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def union_all(self, atoms: Iterable[Atom]) -> None:
        items = list(atoms)
        for other in items[1:]:
            self.union(items[0], other)


def _group_extrema(
    atoms: Sequence[Atom],
    constraints: Sequence[Sentence],
    weighted: Sequence[tuple[Sentence, Fraction]],
    cap: int,
) -> Optional[tuple[Fraction, Fraction]]:
    """Min and max of the weighted truth sum over satisfying assignments of a
    single component, or None if the constraints are unsatisfiable."""
    atoms_sorted = sorted(set(atoms), key=lambda a: a.name)
    lowest: Optional[Fraction] = None
    highest: Optional[Fraction] = None
    visited = 0

    def leaf(assignment: dict[Atom, bool]) -> None:
        nonlocal lowest, highest, visited
        free = [a for a in atoms_sorted if a not in assignment]
        for combo in itertools.product((False, True), repeat=len(free)):
            visited += 1
            if visited > cap:
                raise EnumerationCapError(
                    f"component enumeration exceeded {cap} worlds"
                )
            world = dict(assignment)
            world.update(zip(free, combo))
            total = ZERO
            for sentence, quantity in weighted:
                reduced = simplify(sentence, world)
                if isinstance(reduced, Top):
                    total += quantity
                elif not isinstance(reduced, Bottom):
                    raise AssertionError("position atoms escaped the component")
            if lowest is None or total < lowest:
                lowest = total
            if highest is None or total > highest:
                highest = total

    def search(assignment: dict[Atom, bool], residuals: list[Sentence]) -> None:
        if not residuals:
            leaf(assignment)
            return
        atom = _branch_atom(residuals)
        for value in (False, True):
            branched = _propagate(residuals, {**assignment, atom: value})
            if branched is not None:
                search(*branched)

    seeded = _propagate(constraints)
    if seeded is None:
        return None
    search(*seeded)
    if lowest is None or highest is None:
        return None
    return lowest, highest


class FragmentContext:
    """Precomputed evaluation context for one consistent theory fragment.

    Construction runs unit propagation, groups the residual (non-unit)
    constraints into connected components, and verifies each component is
    satisfiable; an unsatisfiable fragment raises
    :class:`InconsistentFragmentError` immediately.
    """

    def __init__(
        self,
        fragment: TheoryFragment,
        day: Optional[int] = None,
        world_cap: int = DEFAULT_WORLD_CAP,
    ):
        self.fragment = fragment
        self.day = day
        self.world_cap = world_cap
        where = f" at day {day}" if day is not None else ""
        seeded = _propagate(fragment.sentences)
        if seeded is None:
            raise InconsistentFragmentError(
                f"theory fragment is propositionally inconsistent{where}", day
            )
        self.forced, residuals = seeded

        finder = _UnionFind()
        for sentence in residuals:
            finder.union_all(atoms_of(sentence))
        grouped: dict[Atom, list[Sentence]] = {}
        for sentence in residuals:
            root = finder.find(next(iter(atoms_of(sentence))))
            grouped.setdefault(root, []).append(sentence)
        self._residual_groups: dict[Atom, tuple[Sentence, ...]] = {}
        self._atom_group: dict[Atom, Atom] = {}
        for root, sentences in grouped.items():
            members: set[Atom] = set()
            for sentence in sentences:
                members |= atoms_of(sentence)
            key = min(members, key=lambda a: a.name)
            self._residual_groups[key] = tuple(
                sorted(sentences, key=sort_key)
            )
            for atom in members:
                self._atom_group[atom] = key
        for key, sentences in sorted(
            self._residual_groups.items(), key=lambda kv: kv[0].name
        ):
            atoms = set()
            for sentence in sentences:
                atoms |= atoms_of(sentence)
            if _group_extrema(sorted(atoms, key=lambda a: a.name), sentences, (), world_cap) is None:
                raise InconsistentFragmentError(
                    f"theory fragment is propositionally inconsistent{where}", day
                )

    def truth(self, sentence: Sentence) -> Optional[bool]:
        """Truth value settled by unit propagation, or None if undecided."""
        reduced = simplify(sentence, self.forced)
        if isinstance(reduced, Top):
            return True
        if isinstance(reduced, Bottom):
            return False
        return None

    def value_range(
        self, positions: Mapping[Sentence, Fraction]
    ) -> tuple[Fraction, Fraction]:
        """Exact extrema of ``sum(shares * truth(sentence))`` over plausible worlds.

        Positions settled by the fragment contribute their constant value;
        the rest are grouped with any residual constraints that share atoms
        and enumerated jointly per component.
        """
        base = ZERO
        open_positions: list[tuple[Sentence, Fraction]] = []
        for sentence, quantity in positions.items():
            if quantity == 0:
                continue
            reduced = simplify(sentence, self.forced)
            if isinstance(reduced, Top):
                base += quantity
            elif not isinstance(reduced, Bottom):
                open_positions.append((reduced, quantity))
        if not open_positions:
            return base, base

        finder = _UnionFind()
        touched_groups: set[Atom] = set()
        for sentence, _ in open_positions:
            atoms = atoms_of(sentence)
            finder.union_all(atoms)
            for atom in atoms:
                group = self._atom_group.get(atom)
                if group is not None and group not in touched_groups:
                    touched_groups.add(group)
        for group in touched_groups:
            members: set[Atom] = set()
            for sentence in self._residual_groups[group]:
                members |= atoms_of(sentence)
            finder.union_all(members)

        buckets: dict[Atom, dict] = {}

        def bucket_for(atom: Atom) -> dict:
            root = finder.find(atom)
            bucket = buckets.get(root)
            if bucket is None:
                bucket = {"atoms": set(), "constraints": [], "weighted": []}
                buckets[root] = bucket
            return bucket

        seen_groups: set[Atom] = set()
        for sentence, quantity in open_positions:
            atoms = atoms_of(sentence)
            bucket = bucket_for(next(iter(atoms)))
            bucket["atoms"] |= atoms
            bucket["weighted"].append((sentence, quantity))
        for group in touched_groups:
            if group in seen_groups:
                continue
            seen_groups.add(group)
            sentences = self._residual_groups[group]
            members: set[Atom] = set()
            for sentence in sentences:
                members |= atoms_of(sentence)
            bucket = bucket_for(next(iter(members)))
            bucket["atoms"] |= members
            bucket["constraints"].extend(sentences)

        low_total, high_total = base, base
        for root in sorted(buckets, key=lambda a: a.name):
            bucket = buckets[root]
            extrema = _group_extrema(
                sorted(bucket["atoms"], key=lambda a: a.name),
                bucket["constraints"],
                sorted(bucket["weighted"], key=lambda sq: sort_key(sq[0])),
                self.world_cap,
            )
            if extrema is None:
                raise InconsistentFragmentError(
                    "fragment residuals became unsatisfiable", self.day
                )
            low_total += extrema[0]
            high_total += extrema[1]
        return low_total, high_total
