from fractions import Fraction as F

import pytest

from beliefmarket.deduction import (
    DiagonalRule,
    PriceFactRule,
    ScriptedProcess,
    SentenceStream,
    StreamProcess,
    bin_rules,
    countdown_program,
    forever_program,
    parse_script,
    reflective_extend,
    run_bounded,
    step,
    theorem_stream,
)
from beliefmarket.errors import (
    EvaluationError,
    InconsistentFragmentError,
    NestednessError,
    ScriptError,
)
from beliefmarket.logic import Atom, Not, TheoryFragment, parse_sentence

a, b = Atom("a"), Atom("b")


class TestScriptedStep:
    def test_cumulative(self):
        process = ScriptedProcess({1: {a}, 2: {a, b}})
        assert step(process, 2) == TheoryFragment.of(a, b)

    def test_nestedness_violation(self):
        class Forgetful(ScriptedProcess):
            def _generate(self, day):
                return {a} if day == 1 else {b}

        with pytest.raises(NestednessError) as err:
            Forgetful({}).step(2)
        assert "day 2" in str(err.value) and "'a'" in str(err.value)

    def test_inconsistency_names_day(self):
        process = ScriptedProcess({1: {a}, 3: {Not(a)}})
        with pytest.raises(InconsistentFragmentError) as err:
            process.step(3)
        assert "day 3" in str(err.value)
        assert process.step(2) == TheoryFragment.of(a)


class TestScripts:
    def test_gap_fill(self):
        process = parse_script("day 1: a\nday 5: b\n")
        assert step(process, 3) == TheoryFragment.of(a)
        assert step(process, 5) == TheoryFragment.of(a, b)

    def test_empty_file(self):
        process = parse_script("")
        assert step(process, 4) == TheoryFragment.of()

    def test_duplicate_lines_deduplicated(self):
        process = parse_script("day 1: a\nday 1: a\nday 2: a\n")
        assert len(step(process, 2)) == 1

    def test_comments_and_format_errors(self):
        process = parse_script("# header\nday 1: a & b  # trailing\n")
        assert step(process, 1) == TheoryFragment.of(parse_sentence("a & b"))
        with pytest.raises(ScriptError):
            parse_script("day one: a")

    def test_non_monotone_rejected(self):
        with pytest.raises(ScriptError) as err:
            parse_script("day 3: a\nday 1: b\n")
        assert "non-monotone" in str(err.value)


class TestStreams:
    def test_delay_2n(self):
        stream = theorem_stream(lambda k: Atom(f"t_{k}"), lambda k: 2 * k)
        assert step(stream, 7) == TheoryFragment.of(
            Atom("t_1"), Atom("t_2"), Atom("t_3")
        )

    def test_identity_delay(self):
        stream = theorem_stream(lambda k: Atom(f"t_{k}"), lambda k: k)
        assert step(stream, 3) == TheoryFragment.of(
            Atom("t_1"), Atom("t_2"), Atom("t_3")
        )

    def test_halting_stream_matches_interpreter(self):
        # Machines: countdown(k) halts, the tight loop never does. The stream
        # must contain exactly the sentences the bounded interpreter accepts.
        halts = SentenceStream(
            lambda k: Atom(f"h_{k}"),
            lambda k: k + 1,
            include=lambda k: run_bounded(countdown_program(), k, 4 * k + 8),
        )
        stalls = SentenceStream(
            lambda k: Atom(f"s_{k}"),
            lambda k: k + 1,
            negate=True,
            include=lambda k: not run_bounded(forever_program(), k, 2 * k + 5),
        )
        process = StreamProcess((halts, stalls))
        fragment = step(process, 9)
        for k in range(1, 9):
            accepted = run_bounded(countdown_program(), k, 4 * k + 8)
            assert (Atom(f"h_{k}") in fragment) == accepted
            assert Not(Atom(f"s_{k}")) in fragment

    def test_interpreter_counts_steps(self):
        # countdown reaches halt after 3k + 1 steps; the bound is sharp.
        assert run_bounded(countdown_program(), 5, 16)
        assert not run_bounded(countdown_program(), 5, 15)
        assert not run_bounded(forever_program(), 0, 10_000)


class TestReflective:
    def history(self, prices):
        return [dict(day) for day in prices]

    def test_diagonal_true_below_threshold(self):
        rule = DiagonalRule("chi", F(1, 2))
        chi3 = rule.sentence(3)
        history = self.history([{}, {}, {chi3: F(2, 5)}])
        fragment = reflective_extend(history, [rule], 4)
        assert chi3 in fragment

    def test_diagonal_false_at_threshold(self):
        rule = DiagonalRule("chi", F(1, 2))
        chi3 = rule.sentence(3)
        history = self.history([{}, {}, {chi3: F(1, 2)}])
        fragment = reflective_extend(history, [rule], 4)
        assert Not(chi3) in fragment

    def test_price_fact_outside_band(self):
        phi = Atom("phi")
        rule = PriceFactRule(lambda _m: phi, F(1, 5), F(4, 5))
        history = self.history([{}, {phi: F(9, 10)}])
        fragment = reflective_extend(history, [rule], 3)
        assert Not(rule.sentence(2)) in fragment

    def test_no_same_day_reads(self):
        rule = DiagonalRule("chi", F(1, 2))
        base = self.history([{rule.sentence(1): F(1, 4)}])
        mutated = base + [{rule.sentence(2): F(99, 100)}]
        assert reflective_extend(base, [rule], 2) == reflective_extend(
            mutated, [rule], 2
        )

    def test_single_polarity_per_diagonal(self):
        rule = DiagonalRule("chi", F(1, 2))
        history = self.history(
            [{rule.sentence(1): F(1, 4)}, {rule.sentence(2): F(3, 4)}]
        )
        fragment = reflective_extend(history, [rule], 3)
        for m in (1, 2):
            atom = rule.sentence(m)
            assert (atom in fragment) != (Not(atom) in fragment)

    def test_unpriced_reads_zero(self):
        rule = DiagonalRule("chi", F(1, 2))
        fragment = reflective_extend([{}], [rule], 2)
        assert rule.sentence(1) in fragment  # 0 < 1/2

    def test_short_history_rejected(self):
        rule = DiagonalRule("chi", F(1, 2))
        with pytest.raises(EvaluationError):
            reflective_extend([], [rule], 2)

    def test_bin_rules_tile_the_interval(self):
        phi = Atom("phi")
        rules = bin_rules("bin", 4, lambda _m: phi, lambda m: m + 2)
        for price in (F(0), F(1, 8), F(1, 4), F(1, 2), F(3, 4), F(1)):
            hits = [rule for rule in rules if rule.holds(price)]
            assert len(hits) == 1
        history = self.history([{phi: F(3, 5)}, {}, {}])
        fragment = reflective_extend(history, rules, 4)  # observes day 3 for m=1
        # m=1 observes day 3 where phi is unpriced -> reads 0 -> bin 0.
        assert rules[0].sentence(1) in fragment
        for rule in rules[1:]:
            assert Not(rule.sentence(1)) in fragment

    def test_deferred_observation_day(self):
        phi = Atom("phi")
        rules = bin_rules("bin", 2, lambda _m: phi, lambda m: m + 1)
        history = self.history([{phi: F(1, 4)}, {phi: F(3, 4)}])
        fragment = reflective_extend(history, rules, 3)
        # Index 1 settles from the day-2 price (3/4): upper bin.
        assert rules[1].sentence(1) in fragment
        assert Not(rules[0].sentence(1)) in fragment
