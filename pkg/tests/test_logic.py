import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beliefmarket.errors import (
    EnumerationCapError,
    SentenceSyntaxError,
    SupportError,
    UncoveredAtomError,
)
from beliefmarket.logic import (
    BOTTOM,
    TOP,
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
    is_consistent,
    parse_sentence,
    plausible_worlds,
    render,
)

from oracles import brute_worlds, random_clause

a, b, c = Atom("a"), Atom("b"), Atom("c")


ATOMS = [Atom(name) for name in "abcde"]

sentence_trees = st.recursive(
    st.sampled_from(ATOMS) | st.just(TOP) | st.just(BOTTOM),
    lambda inner: st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Implies, inner, inner),
        st.builds(Iff, inner, inner),
    ),
    max_leaves=12,
)


class TestParse:
    def test_and_not(self):
        assert parse_sentence("a & ~b") == And(a, Not(b))

    def test_implies_right_associative(self):
        assert parse_sentence("a -> b -> c") == Implies(a, Implies(b, c))

    def test_malformed_reports_position(self):
        with pytest.raises(SentenceSyntaxError) as err:
            parse_sentence("a & | b")
        assert "'|'" in str(err.value)
        assert err.value.position == 4

    def test_empty_input(self):
        with pytest.raises(SentenceSyntaxError):
            parse_sentence("   ")

    def test_constants_and_parens(self):
        assert parse_sentence("T | (F & a)") == Or(TOP, And(BOTTOM, a))

    def test_iff_binds_loosest(self):
        assert parse_sentence("a -> b <-> c") == Iff(Implies(a, b), c)

    def test_and_binds_tighter_than_or(self):
        assert parse_sentence("a | b & c") == Or(a, And(b, c))

    def test_trailing_garbage(self):
        with pytest.raises(SentenceSyntaxError):
            parse_sentence("a b")

    def test_bad_character(self):
        with pytest.raises(SentenceSyntaxError):
            parse_sentence("a % b")


class TestRender:
    def test_fully_parenthesized(self):
        assert render(parse_sentence("a & ~b")) == "(a & ~b)"
        assert render(Not(And(a, b))) == "~(a & b)"

    @given(sentence_trees)
    @settings(max_examples=300, deadline=None)
    def test_parse_render_roundtrip(self, tree):
        assert parse_sentence(render(tree)) == tree

    @given(sentence_trees, sentence_trees)
    @settings(max_examples=200, deadline=None)
    def test_render_injective(self, left, right):
        if left != right:
            assert render(left) != render(right)


class TestEval:
    def test_contradiction(self):
        world = World.of({a: True})
        assert eval_sentence(And(a, Not(a)), world) is False

    def test_tautology(self):
        for value in (True, False):
            world = World.of({a: value})
            assert eval_sentence(Or(a, Not(a)), world) is True

    def test_implication_truth_table(self):
        world = World.of({a: True, b: False})
        assert eval_sentence(Implies(a, b), world) is False

    def test_uncovered_atom_named(self):
        with pytest.raises(UncoveredAtomError) as err:
            eval_sentence(b, World.of({a: True}))
        assert "'b'" in str(err.value)


class TestAtomsOf:
    def test_two_atoms(self):
        assert atoms_of(And(a, Not(b))) == frozenset({a, b})

    def test_constants_have_none(self):
        assert atoms_of(TOP) == frozenset()

    def test_set_semantics(self):
        assert atoms_of(Or(a, a)) == frozenset({a})


class TestConsistency:
    def test_contradictory_pair(self):
        assert not is_consistent(TheoryFragment.of(a, Not(a)))

    def test_empty_theory(self):
        assert is_consistent(TheoryFragment.of())

    def test_witnessed(self):
        assert is_consistent(TheoryFragment.of(Or(a, b), Not(a)))


class TestPlausibleWorlds:
    def test_unit_propagation(self):
        fragment = TheoryFragment.of(Or(a, b), Not(a))
        worlds = plausible_worlds(fragment, {a, b})
        assert worlds == frozenset({World.of({a: False, b: True})})

    def test_free_atom_doubles(self):
        fragment = TheoryFragment.of(a)
        worlds = plausible_worlds(fragment, {a, b})
        assert worlds == frozenset(
            {World.of({a: True, b: True}), World.of({a: True, b: False})}
        )

    def test_random_3cnf_matches_brute_force(self):
        rng = random.Random(7)
        atoms = [Atom(f"x{i}") for i in range(10)]
        for _ in range(20):
            clauses = [random_clause(rng, atoms) for _ in range(rng.randrange(1, 12))]
            fragment = TheoryFragment.from_iterable(clauses)
            assert plausible_worlds(fragment, atoms) == brute_worlds(fragment, atoms)

    def test_support_must_cover_fragment(self):
        with pytest.raises(SupportError):
            plausible_worlds(TheoryFragment.of(And(a, b)), {a})

    def test_cap_enforced(self):
        fragment = TheoryFragment.of()
        atoms = [Atom(f"y{i}") for i in range(8)]
        with pytest.raises(EnumerationCapError):
            plausible_worlds(fragment, atoms, cap=100)

    def test_consistency_iff_nonempty(self):
        rng = random.Random(11)
        atoms = [Atom(f"z{i}") for i in range(6)]
        for _ in range(30):
            clauses = [random_clause(rng, atoms) for _ in range(rng.randrange(0, 10))]
            fragment = TheoryFragment.from_iterable(clauses)
            nonempty = bool(plausible_worlds(fragment, fragment.atoms, cap=None))
            assert is_consistent(fragment) == nonempty

    def test_monotone_in_fragment(self):
        rng = random.Random(13)
        atoms = [Atom(f"w{i}") for i in range(6)]
        for _ in range(30):
            small = [random_clause(rng, atoms) for _ in range(rng.randrange(0, 4))]
            extra = [random_clause(rng, atoms) for _ in range(rng.randrange(0, 4))]
            weaker = TheoryFragment.from_iterable(small)
            stronger = TheoryFragment.from_iterable(small + extra)
            assert plausible_worlds(stronger, atoms) <= plausible_worlds(weaker, atoms)
