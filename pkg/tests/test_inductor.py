from fractions import Fraction as F

import pytest

from beliefmarket.deduction import DiagonalRule, ScriptedProcess, theorem_stream
from beliefmarket.errors import ConfigError, ResolutionFailureError
from beliefmarket.inductor import (
    InductorConfig,
    PoolMember,
    TraderPool,
    budget_scale,
    complement_arbitrageur,
    find_prices,
    firm_trade,
    reflection_arbitrageur,
    run_inductor,
    scale_for_budget,
    support_sentences,
    theorem_buyer,
)
from beliefmarket.logic import (
    EMPTY_FRAGMENT,
    Atom,
    FragmentContext,
    Not,
    TheoryFragment,
)
from beliefmarket.trading import (
    Holdings,
    Trade,
    fixed_trader,
    parse_feature,
    plausible_value_range,
)

from oracles import brute_value_range

phi = Atom("phi")
psi = Atom("psi")


def single_pool(trader, weight=F(1), budget=F(10)):
    return TraderPool.of([PoolMember(trader, weight, budget)])


def tight_config(pool, epsilon=F(1, 4096)):
    return InductorConfig(pool=pool, epsilon=lambda n, e=epsilon: e)


class TestSupport:
    def test_union_of_trades_and_fragment(self):
        pool = single_pool(fixed_trader("t", [(phi, parse_feature("1"))]))
        support = support_sentences(pool, 1, TheoryFragment.of(psi))
        assert set(support) == {phi, psi}

    def test_empty(self):
        assert support_sentences(TraderPool.of([]), 1, EMPTY_FRAGMENT) == ()

    def test_shared_sentence_listed_once(self):
        pool = TraderPool.of(
            [
                PoolMember(fixed_trader("a", [(phi, parse_feature("1"))]), F(1), F(1)),
                PoolMember(fixed_trader("b", [(phi, parse_feature("-1"))]), F(1), F(1)),
            ],
            activation=lambda day: 2,
        )
        assert support_sentences(pool, 1, EMPTY_FRAGMENT) == (phi,)

    def test_price_references_included(self):
        pool = single_pool(
            fixed_trader("t", [(phi, parse_feature("price(psi, 1) - price(phi, 0)"))])
        )
        assert set(support_sentences(pool, 1, EMPTY_FRAGMENT)) == {phi, psi}


class TestBudgetScale:
    def test_chord_formula(self):
        # Floor -0.5, budget 1, full trade drops the floor to -2.5: scale 1/4.
        assert scale_for_budget(F(-1, 2), F(-5, 2), F(1)) == F(1, 4)

    def test_harmless_trade_full_scale(self):
        assert scale_for_budget(F(-1, 2), F(-1, 4), F(1)) == F(1)

    def test_exhausted_budget(self):
        assert scale_for_budget(F(-1), F(-3), F(1)) == F(0)

    def test_wrapper_measures_holdings(self):
        held = Holdings(((phi, F(1)),), F(-1, 2))  # floor -1/2
        trade = Trade.build({phi: F(4)}, F(-2))  # floor of sum: -5/2... scale 1/4
        context = FragmentContext(EMPTY_FRAGMENT)
        assert budget_scale(held, trade, context, F(1)) == F(1, 4)

    def test_scaled_trade_respects_budget(self):
        held = Holdings.empty()
        trade = Trade.build({phi: F(8)}, F(-4))
        context = FragmentContext(EMPTY_FRAGMENT)
        scale = budget_scale(held, trade, context, F(1))
        scaled = trade.scaled(scale)
        low, _ = plausible_value_range(scaled, context)
        assert low >= F(-1)


class TestFirmTrade:
    def test_empty_pool(self):
        trade = firm_trade(TraderPool.of([]), {}, [], 1, EMPTY_FRAGMENT)
        assert trade.is_zero

    def test_single_member_identity(self):
        pool = single_pool(fixed_trader("t", [(phi, parse_feature("2"))]))
        trade = firm_trade(pool, {phi: F(2, 5)}, [], 1, EMPTY_FRAGMENT)
        assert trade.shares_dict() == {phi: F(2)}
        assert trade.cash == F(-4, 5)

    def test_opposite_traders_cancel(self):
        pool = TraderPool.of(
            [
                PoolMember(fixed_trader("a", [(phi, parse_feature("1"))]), F(1), F(10)),
                PoolMember(fixed_trader("b", [(phi, parse_feature("-1"))]), F(1), F(10)),
            ],
            activation=lambda day: 2,
        )
        trade = firm_trade(pool, {phi: F(1, 2)}, [], 1, EMPTY_FRAGMENT)
        assert trade.is_zero


class TestFindPrices:
    def grid_certified_prices(self, expr_text, epsilon):
        """Exhaustive oracle: all grid prices whose one-trader firm trade has
        max plausible value at most epsilon."""
        expr = parse_feature(expr_text)
        certified = []
        for k in range(1025):
            price = F(k, 1024)
            quantity = expr_eval = None
            from beliefmarket.trading import eval_feature

            quantity = eval_feature(expr, [{phi: price}], 1)
            worst = max(quantity * (1 - price), -quantity * price)
            if worst <= epsilon:
                certified.append(price)
        return certified

    def test_threshold_buyer_lands_at_boundary(self):
        text = "clamp((0.9 - price(phi, 0)) * 64, 0, 1)"
        pool = single_pool(fixed_trader("buyer", [(phi, parse_feature(text))]))
        config = tight_config(pool)
        pricing, cert = find_prices(
            pool, [Holdings.empty()], [], EMPTY_FRAGMENT, F(1, 4096), config
        )
        certified = self.grid_certified_prices(text, F(1, 4096))
        assert pricing[phi] in certified
        assert F(9, 10) <= pricing[phi] <= F(9, 10) + F(1, 1024)
        assert cert.max_value <= F(1, 4096)

    def test_pure_seller_driven_to_zero(self):
        text = "-1"
        pool = single_pool(fixed_trader("seller", [(phi, parse_feature(text))]))
        config = tight_config(pool)
        pricing, cert = find_prices(
            pool, [Holdings.empty()], [], EMPTY_FRAGMENT, F(1, 4096), config
        )
        certified = self.grid_certified_prices(text, F(1, 4096))
        assert pricing[phi] in certified
        assert pricing[phi] <= F(1, 1024)

    def test_empty_pool_posts_initial_price(self):
        pool = TraderPool.of([])
        config = InductorConfig(pool=pool)
        pricing, cert = find_prices(
            pool, [], [], EMPTY_FRAGMENT, F(1, 2), config, support=[phi]
        )
        assert pricing[phi] == F(1, 2)
        assert cert.max_value == 0

    def test_off_grid_crossing_fails_honestly(self):
        # Demand crosses zero only at 1/3, which is not a grid point; with a
        # tiny epsilon no grid price certifies and the search must say so.
        text = "clamp((1/3 - price(phi, 0)) * 64, -1, 1)"
        pool = single_pool(fixed_trader("odd", [(phi, parse_feature(text))]))
        config = InductorConfig(
            pool=pool, epsilon=lambda n: F(1, 65536), max_iterations=200
        )
        assert not self.grid_certified_prices(text, F(1, 65536))
        with pytest.raises(ResolutionFailureError):
            find_prices(
                pool, [Holdings.empty()], [], EMPTY_FRAGMENT, F(1, 65536), config
            )

    def test_forced_sentence_priced_high(self):
        # Buying a proved sentence is free money until its price nears 1.
        text = "clamp((1 - price(phi, 0)) * 64, 0, 1)"
        pool = single_pool(fixed_trader("sure", [(phi, parse_feature(text))]))
        config = tight_config(pool)
        pricing, cert = find_prices(
            pool, [Holdings.empty()], [], TheoryFragment.of(phi), F(1, 4096), config
        )
        assert pricing[phi] >= F(1023, 1024)


class TestRunInductor:
    def test_empty_pool_constant_half(self):
        config = InductorConfig(pool=TraderPool.of([]))
        process = ScriptedProcess({1: {phi}})
        trace = run_inductor(config, process, horizon=5)
        for day in range(1, 6):
            assert trace.price(day, phi) == F(1, 2)
            assert trace.certificates[day - 1].max_value == 0

    def test_theorem_buyer_anticipates_proofs(self):
        family = lambda k: Atom(f"t_{k}")
        process = theorem_stream(family, lambda k: 4 * k)
        pool = single_pool(theorem_buyer(family), weight=F(1, 2), budget=F(8))
        config = InductorConfig(pool=pool)
        trace = run_inductor(config, process, horizon=16)
        # Day 12 trades t_12, proved only at day 48; the price is high anyway.
        assert trace.price(12, family(12)) >= F(9, 10)

    def test_diagonal_settles_on_threshold(self):
        from beliefmarket.deduction import reflective_extend

        rule = DiagonalRule("chi", F(1, 4))
        pool = single_pool(reflection_arbitrageur([rule]), weight=F(1, 2), budget=F(4))
        config = tight_config(pool)
        trace = run_inductor(config, ScriptedProcess({}), [rule], horizon=12)
        for day in range(1, 13):
            assert trace.price(day, rule.sentence(day)) == F(1, 4)
        # Priced exactly at the threshold, each sentence settles false.
        settled = reflective_extend(trace.pricings, [rule], 13)
        for day in range(1, 13):
            assert Not(rule.sentence(day)) in settled

    def test_complement_pins_pair_sums(self):
        pool = single_pool(
            complement_arbitrageur([phi]), weight=F(1, 2), budget=F(4)
        )
        process = ScriptedProcess({})
        config = InductorConfig(pool=pool)
        trace = run_inductor(config, process, horizon=6)
        total = trace.price(6, phi) + trace.price(6, Not(phi))
        assert total == 1

    def test_budget_caps_reckless_seller(self):
        seller = fixed_trader("reckless", [(phi, parse_feature("-8"))])
        pool = single_pool(seller, weight=F(1), budget=F(2))
        config = InductorConfig(pool=pool)
        trace = run_inductor(config, ScriptedProcess({}), horizon=6)
        context = FragmentContext(EMPTY_FRAGMENT)
        scales = [trace.certificates[d].scales[0] for d in range(6)]
        assert any(s < 1 for s in scales)
        for books in trace.books_by_day:
            low, _ = plausible_value_range(books[0], context)
            assert low >= F(-2)

    def test_epsilon_must_not_increase(self):
        config = InductorConfig(
            pool=TraderPool.of([]), epsilon=lambda n: F(1, 2) if n == 1 else F(1)
        )
        with pytest.raises(ConfigError):
            run_inductor(config, ScriptedProcess({}), horizon=2)

    def test_determinism(self):
        family = lambda k: Atom(f"t_{k}")
        pool = single_pool(theorem_buyer(family), weight=F(1, 2), budget=F(8))

        def fresh_trace():
            process = theorem_stream(family, lambda k: 2 * k)
            config = InductorConfig(pool=pool)
            return run_inductor(config, process, horizon=10)

        first, second = fresh_trace(), fresh_trace()
        assert first.pricings == second.pricings
        assert [c.max_value for c in first.certificates] == [
            c.max_value for c in second.certificates
        ]

    def test_certificates_match_brute_force(self):
        family = lambda k: Atom(f"t_{k}")
        process = theorem_stream(family, lambda k: 3 * k)
        pool = single_pool(theorem_buyer(family), weight=F(1, 2), budget=F(8))
        config = InductorConfig(pool=pool)
        trace = run_inductor(config, process, horizon=10)
        for cert in trace.certificates:
            fragment = process.step(cert.day)
            _, high = brute_value_range(cert.firm_trade, fragment)
            assert high == cert.max_value
            assert high <= cert.epsilon

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            InductorConfig(pool=TraderPool.of([]), resolution=F(3, 7)).validate()
        with pytest.raises(ConfigError):
            InductorConfig(
                pool=TraderPool.of([]), initial_price=F(1, 3)
            ).validate()

    def test_activation_ramps_members_in(self):
        pool = TraderPool.of(
            [
                PoolMember(fixed_trader("a", [(phi, parse_feature("1"))]), F(1), F(4)),
                PoolMember(fixed_trader("b", [(psi, parse_feature("1"))]), F(1), F(4)),
            ]
        )
        config = InductorConfig(pool=pool)
        trace = run_inductor(config, ScriptedProcess({}), horizon=2)
        assert psi not in trace.pricings[0]
        assert psi in trace.pricings[1]
