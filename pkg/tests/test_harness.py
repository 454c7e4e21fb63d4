import io
from fractions import Fraction as F

import pytest

from beliefmarket.errors import ConfigError
from beliefmarket.harness import (
    Scenario,
    Variable,
    affine_day_map,
    coherence_probe,
    coherence_report,
    convergence_report,
    expectation,
    experiment_halting,
    experiment_net_update,
    experiment_paradox,
    experiment_provability,
    experiment_self_knowledge,
    indicator,
    parse_scenario,
    read_certificates,
    read_trace_csv,
    trace_csv_text,
    verify_budget_safety,
    verify_certificates,
    verify_firm_value_bound,
    write_certificates,
    write_trace_csv,
)
from beliefmarket.harness import presets
from beliefmarket.harness.variables import DeferralFunction
from beliefmarket.inductor import MarketTrace
from beliefmarket.logic import Atom, Not, TheoryFragment, parse_sentence

phi = Atom("phi")
psi = Atom("psi")


class TestExpectation:
    def test_indicator(self):
        variable = indicator(phi)
        assert expectation({phi: F(7, 10)}, variable) == F(7, 10)

    def test_constant_variable(self):
        variable = Variable.of([(parse_sentence("T"), F(5))])
        assert expectation({parse_sentence("T"): F(1)}, variable) == 5

    def test_three_bins(self):
        variable = Variable.of([(Atom("x0"), F(0)), (Atom("x1"), F(1, 2)), (Atom("x2"), F(1))])
        pricing = {Atom("x0"): F(1, 5), Atom("x1"): F(3, 10), Atom("x2"): F(1, 2)}
        assert expectation(pricing, variable) == F(13, 20)

    def test_linearity(self):
        variable = Variable.of([(phi, F(1, 4)), (Not(phi), F(3, 4))])
        pricing = {phi: F(1, 3), Not(phi): F(2, 3)}
        base = expectation(pricing, variable)
        scaled = variable.scaled(F(2), F(1))
        # a*X + b needs the partition to cover total probability for the
        # constant shift to factor through; here p sums to 1.
        assert expectation(pricing, scaled) == 2 * base + 1

    def test_partition_check(self):
        good = Variable.of([(phi, F(1)), (Not(phi), F(0))])
        assert good.check_partition(TheoryFragment.of())
        overlapping = Variable.of([(phi, F(1)), (parse_sentence("phi | psi"), F(0))])
        assert not overlapping.check_partition(TheoryFragment.of())

    def test_distinct_values_required(self):
        with pytest.raises(ConfigError):
            Variable.of([(phi, F(1)), (Not(phi), F(1))])

    def test_unpriced_partition_reads_zero(self):
        variable = indicator(phi)
        assert expectation({}, variable) == 0


class TestDayMaps:
    def test_affine_forms(self):
        assert affine_day_map("4n")(5) == 20
        assert affine_day_map("n+10")(5) == 15
        assert affine_day_map("2n+3")(4) == 11
        assert affine_day_map("12")(99) == 12

    def test_bad_forms(self):
        for text in ("", "n-3", "4n2", "0"):
            with pytest.raises(ConfigError):
                affine_day_map(text)

    def test_deferral_validated(self):
        deferral = DeferralFunction(affine_day_map("n+10"))
        assert deferral(5) == 15
        with pytest.raises(ConfigError):
            DeferralFunction(affine_day_map("n"))(3)


class FakeTrace:
    """MarketTrace stand-in built directly from price dictionaries."""

    @staticmethod
    def of(series):
        trace = MarketTrace()
        trace.pricings = [dict(day) for day in series]
        return trace


class TestConvergence:
    def test_constant_series(self):
        trace = FakeTrace.of([{phi: F(1, 2)} for _ in range(20)])
        report = convergence_report(trace, [phi], (10, 20))
        assert report.passed
        assert report.details["max_deviation"] == "0"

    def test_alternating_series_deviation(self):
        series = [{phi: F(1, 2) + F((-1) ** n, 2**n)} for n in range(1, 21)]
        trace = FakeTrace.of(series)
        report = convergence_report(trace, [phi], (10, 20), tolerance=F(1, 100))
        values = [day[phi] for day in series]
        expected = max(abs(values[n - 1] - values[19]) for n in range(10, 21))
        assert F(report.details["max_deviation"]) == expected
        assert report.passed == (expected <= F(1, 100))

    def test_window_validation(self):
        trace = FakeTrace.of([{phi: F(1, 2)}])
        with pytest.raises(ConfigError):
            convergence_report(trace, [phi], (1, 5))


class TestCoherence:
    def test_exact_complement(self):
        residuals = coherence_probe({phi: F(3, 5), Not(phi): F(2, 5)}, pairs=[phi])
        assert residuals == [F(0)]

    def test_exact_triple(self):
        pricing = {
            phi: F(1, 2),
            psi: F(1, 2),
            parse_sentence("phi | psi"): F(3, 4),
            parse_sentence("phi & psi"): F(1, 4),
        }
        assert coherence_probe(pricing, triples=[(phi, psi)]) == [F(0)]

    def test_implication_flagged(self):
        pricing = {phi: F(4, 5), psi: F(3, 5)}
        assert coherence_probe(pricing, implications=[(phi, psi)]) == [F(1, 5)]

    def test_report(self):
        trace = FakeTrace.of([{phi: F(2, 3), Not(phi): F(1, 3)}])
        report = coherence_report(trace, [phi])
        assert report.passed


class TestTraceFiles:
    def sample_pricings(self):
        return [
            {phi: F(1, 2), parse_sentence("phi & psi"): F(1, 4)},
            {phi: F(461, 512)},
        ]

    def test_roundtrip_exact(self):
        buffer = io.StringIO()
        write_trace_csv(self.sample_pricings(), buffer)
        parsed = read_trace_csv(io.StringIO(buffer.getvalue()))
        assert parsed == self.sample_pricings()

    def test_header_and_quoting(self):
        buffer = io.StringIO()
        write_trace_csv(self.sample_pricings(), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "day,sentence,price_num,price_den"
        assert '1,"(phi & psi)",1,4' in lines

    def test_rewrite_is_byte_identical(self):
        buffer = io.StringIO()
        write_trace_csv(self.sample_pricings(), buffer)
        parsed = read_trace_csv(io.StringIO(buffer.getvalue()))
        again = io.StringIO()
        write_trace_csv(parsed, again)
        assert again.getvalue() == buffer.getvalue()

    def test_bad_price_rejected(self):
        text = 'day,sentence,price_num,price_den\n1,"phi",3,2\n'
        with pytest.raises(ConfigError):
            read_trace_csv(io.StringIO(text))

    def test_certificates_roundtrip(self):
        scenario = presets.empty_pool(horizon=3)
        trace = scenario.run()
        buffer = io.StringIO()
        write_certificates(trace.certificates, buffer)
        rows = read_certificates(io.StringIO(buffer.getvalue()))
        assert [row[0] for row in rows] == [1, 2, 3]
        assert all(row[2] <= row[1] for row in rows)


class TestScenarioParsing:
    MINIMAL = """
[deduction]
stream = theorems
delay = 3n

[market]
horizon = 6

[probes]
track = thm_1

[pool]
member = theorem_buyer weight=1/2 budget=8
"""

    def test_minimal_runs(self):
        scenario = parse_scenario(self.MINIMAL, name="mini")
        trace = scenario.run()
        assert trace.horizon == 6
        assert all(c.max_value <= c.epsilon for c in trace.certificates)

    def test_unknown_member_kind(self):
        with pytest.raises(ConfigError):
            parse_scenario(
                self.MINIMAL.replace("theorem_buyer", "unknown_kind"), name="bad"
            )

    def test_missing_horizon(self):
        with pytest.raises(ConfigError):
            parse_scenario("[market]\nresolution = 1/1024\n[pool]\n")

    def test_inline_strategy(self):
        text = """
[market]
horizon = 8

[strategy pin]
"w" : clamp((3/4 - price(w, 0)) * 16, -1/4, 1/4)

[pool]
member = strategy:pin weight=1 budget=4
"""
        scenario = parse_scenario(text)
        trace = scenario.run()
        # Early days certify at the initial price under the loose epsilons;
        # once epsilon tightens the pin target is the only certifiable point.
        assert trace.price(8, Atom("w")) == F(3, 4)

    def test_unknown_member_option(self):
        with pytest.raises(ConfigError):
            parse_scenario(self.MINIMAL.replace("budget=8", "budget=8 zap=1"))

    def test_standard_preset_shape(self):
        scenario = presets.standard(horizon=10)
        assert len(scenario.config.pool.members) == 5
        assert len(scenario.probes) == 10
        assert len(scenario.pairs) == 3
        assert len(scenario.diagonal_rules) == 2


class TestExperiments:
    def test_provability_small(self):
        report = experiment_provability(
            presets.standard(horizon=40), window=(30, 40)
        )
        assert report.passed
        assert not report.control

    def test_provability_empty_pool_is_control(self):
        scenario = presets.empty_pool(horizon=12)
        report = experiment_provability(scenario, window=(8, 12))
        assert report.control
        assert report.passed is None
        # No trader ever trades the day-n sentence before its proof day, so
        # it reads the off-support default 0; proved sentences sit in the
        # support via the fragment and stay at the initial price.
        assert all(v == 0 for v in report.series["theorem_diag"])
        trace = scenario.run()
        assert trace.price(12, Atom("thm_1")) == F(1, 2)

    def test_paradox_small(self):
        report = experiment_paradox(
            presets.paradox(F(1, 2), horizon=30), F(1, 2), window=(15, 30)
        )
        assert report.passed
        assert report.details["max_gap"] == "0"

    def test_paradox_control_marked(self):
        report = experiment_paradox(
            presets.paradox(F(1, 2), horizon=10, control=True), F(1, 2)
        )
        assert report.control
        assert report.passed is None

    def test_paradox_needs_matching_rule(self):
        with pytest.raises(ConfigError):
            experiment_paradox(presets.paradox(F(1, 2), horizon=5), F(1, 3))

    def test_halting_small(self):
        report = experiment_halting(presets.halting(horizon=40), window=(30, 40))
        assert report.passed
        final = F(report.details["undecided_final_price"])
        assert 0 < final < 1

    def test_self_knowledge_inside_and_outside(self):
        inside = experiment_self_knowledge(
            presets.self_knowledge(horizon=40), window=(20, 40)
        )
        assert inside.passed
        outside = experiment_self_knowledge(
            presets.self_knowledge(horizon=40, target=F(15, 16)), window=(20, 40)
        )
        assert outside.passed
        assert outside.details["highest_outside_price"] == "0"

    def test_net_update_small(self):
        report = experiment_net_update(
            presets.net_update(horizon=40), window=(30, 40)
        )
        assert report.passed

    def test_report_serializes(self):
        report = experiment_paradox(
            presets.paradox(F(1, 2), horizon=10), F(1, 2), window=(5, 10)
        )
        data = report.to_dict()
        assert data["name"] == "paradox"
        assert isinstance(data["series"]["diagonal"], list)


class TestVerification:
    def test_standard_short_run_verifies(self):
        scenario = presets.standard(horizon=25)
        trace = scenario.run()
        verify_certificates(scenario, trace)
        verify_budget_safety(scenario, trace)
        bound = verify_firm_value_bound(scenario, trace)
        assert bound <= sum(c.epsilon for c in trace.certificates)
