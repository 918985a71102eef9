import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syntheq import (
    ExactnessError,
    ExerciseStyle,
    Forward,
    Loan,
    Money,
    OptionKind,
    Party,
    Portfolio,
    SettlementMode,
    Side,
    Stock,
    VerdictKind,
    check_parity_conditions,
    detect_constructive_trade,
    economic_equivalence,
    loan_maturity_value,
    make_rate,
    parse_money,
    payoff_profile,
    portfolio_payoff,
    position,
    synthesize_loan,
    synthesize_long_stock,
    title_transfer_audit,
)

from conftest import QTY, SETTLE_DATE, TRADE_DATE, make_option, random_portfolio, scenario_units

X = Party("X")
Y = Party("Y")
S0 = parse_money("100.00")
RATE = make_rate(5, 100)


def canonical_bundle():
    return synthesize_long_stock("ABC", QTY, S0, RATE, TRADE_DATE, SETTLE_DATE, X, Y)


def bundle_parts(portfolio):
    loan_pos, call_pos, put_pos = portfolio.positions
    return loan_pos.instrument, call_pos.instrument, put_pos.instrument


def stock_portfolio(qty=QTY, owner=X, side=Side.LONG):
    return Portfolio(owner, (position(owner, Stock("ABC", qty), side),))


class TestConditions:
    def test_canonical_configuration_passes_all_six(self):
        loan, call, put = bundle_parts(canonical_bundle())
        report = check_parity_conditions(call, put, loan, issuer="ABC", initial_price=S0, quantity=QTY)
        assert report.all_pass
        assert len(report.checks) == 6

    def test_strike_mismatch_fails_condition_one(self, x, y, loan):
        call = make_option(OptionKind.CALL, holder=x, writer=y)
        put = make_option(OptionKind.PUT, holder=y, writer=x, strike="110.00")
        report = check_parity_conditions(call, put, loan, issuer="ABC", initial_price=S0, quantity=QTY)
        assert not report.all_pass
        assert report.failed() == ("strikes_equal",)
        assert "110" in report["strikes_equal"].detail

    def test_american_put_fails_condition_five(self, x, y, loan):
        call = make_option(OptionKind.CALL, holder=x, writer=y)
        put = make_option(OptionKind.PUT, holder=y, writer=x, style=ExerciseStyle.AMERICAN)
        report = check_parity_conditions(call, put, loan, issuer="ABC", initial_price=S0, quantity=QTY)
        assert report.failed() == ("both_european",)


class TestSynthesize:
    def test_canonical_bundle_layout(self):
        loan, call, put = bundle_parts(canonical_bundle())
        assert loan.principal == parse_money("100000000.00")
        assert call.strike_per_share == put.strike_per_share == parse_money("105.00")
        assert call.holder == X and call.writer == Y
        assert put.holder == Y and put.writer == X

    def test_zero_quantity_rejected(self):
        with pytest.raises(Exception, match="positive"):
            synthesize_long_stock("ABC", 0, S0, RATE, TRADE_DATE, SETTLE_DATE, X, Y)

    def test_fractional_strike_resolved_exactly(self):
        # 2M shares at 50.00: loan 100M, strike total 105M -> 52.50/share
        bundle = synthesize_long_stock(
            "ABC", 2_000_000, parse_money("50.00"), RATE, TRADE_DATE, SETTLE_DATE, X, Y
        )
        loan, call, _ = bundle_parts(bundle)
        assert loan.principal == parse_money("100000000.00")
        assert call.strike_per_share == parse_money("52.50")

    def test_indivisible_strike_errors(self):
        # 7 shares at 1.00 and 5%: strike total 7.35 does not split over 7
        # shares... it does (1.05); use 3 shares at 0.01 and 1/3 instead
        with pytest.raises(ExactnessError):
            synthesize_long_stock(
                "ABC", 2, parse_money("0.01"), make_rate(1, 2), TRADE_DATE, SETTLE_DATE, X, Y
            )

    def test_synthetic_loan_payoff_is_constant(self):
        portfolio = synthesize_loan("ABC", QTY, S0, RATE, TRADE_DATE, SETTLE_DATE, Y, X)
        profile = payoff_profile(portfolio)
        assert profile.uniform_slope == 0
        for units in (8_000, 10_500, 15_000):
            assert profile.value_at(Money(units)) == parse_money("105000000.00")
            assert portfolio_payoff(portfolio, scenario_units(units)) == parse_money(
                "105000000.00"
            )


class TestProfiles:
    def test_long_call_profile(self, x, y):
        call = make_option(OptionKind.CALL, holder=x, writer=y)
        profile = payoff_profile(Portfolio(x, (position(x, call),)))
        assert profile.breakpoints == (10_500,)
        assert profile.slopes == (Fraction(0), Fraction(QTY))
        assert profile.intercept == Money(0)

    def test_bundle_kink_vanishes(self):
        profile = payoff_profile(canonical_bundle())
        assert profile.breakpoints == ()
        assert profile.slopes == (Fraction(QTY),)
        assert profile.intercept == Money(0)

    def test_pure_loan_profile(self, loan):
        profile = payoff_profile(Portfolio(X, (position(X, loan),)))
        assert profile.breakpoints == ()
        assert profile.slopes == (Fraction(0),)
        assert profile.intercept == parse_money("105000000.00")

    def test_profile_matches_brute_force_for_bundle(self):
        bundle = canonical_bundle()
        profile = payoff_profile(bundle)
        for units in range(0, 31_600, 100):
            assert profile.value_at(Money(units)) == portfolio_payoff(
                bundle, scenario_units(units)
            )


class TestEquivalence:
    def test_synthetic_equals_direct_stock(self):
        result = economic_equivalence(canonical_bundle(), stock_portfolio())
        assert result.equivalent

    def test_dense_grid_oracle_agrees(self):
        # independent check at one-peso steps over [0, 300]
        bundle = canonical_bundle()
        stock = stock_portfolio()
        for units in range(0, 30_100, 100):
            sc = scenario_units(units)
            assert portfolio_payoff(bundle, sc) == portfolio_payoff(stock, sc)

    def test_pure_loan_diverges_with_witness(self, loan):
        loan_only = Portfolio(X, (position(X, loan),))
        result = economic_equivalence(loan_only, stock_portfolio())
        assert not result.equivalent
        assert result.witness is not None
        # the witness is a concrete price at which the payoffs differ
        profile_a = payoff_profile(loan_only)
        profile_b = payoff_profile(stock_portfolio())
        assert profile_a.value_at(result.witness) != profile_b.value_at(result.witness)

    def test_lend_pv_plus_forward_equals_stock(self, x, y):
        forward = Forward(
            buyer=x,
            seller=y,
            issuer="ABC",
            quantity=QTY,
            delivery_price_per_share=parse_money("105.00"),
            trade_date=TRADE_DATE,
            delivery_date=SETTLE_DATE,
            settlement=SettlementMode.CASH_NET,
        )
        loan = Loan(x, y, parse_money("100000000.00"), RATE, TRADE_DATE, SETTLE_DATE)
        combo = Portfolio(x, (position(x, loan), position(x, forward)))
        assert economic_equivalence(combo, stock_portfolio(owner=x)).equivalent

    def test_symmetry(self, loan):
        a = Portfolio(X, (position(X, loan),))
        b = stock_portfolio()
        assert economic_equivalence(a, b).equivalent == economic_equivalence(b, a).equivalent

    def test_three_replication_routes_are_transitive(self, x, y):
        """Options bundle, forward plus lending, and swap plus lending all
        replicate the same block of shares at matched parameters."""
        from syntheq import Swap

        loan = Loan(x, y, parse_money("100000000.00"), RATE, TRADE_DATE, SETTLE_DATE)
        forward = Forward(
            buyer=x,
            seller=y,
            issuer="ABC",
            quantity=QTY,
            delivery_price_per_share=parse_money("105.00"),
            trade_date=TRADE_DATE,
            delivery_date=SETTLE_DATE,
            settlement=SettlementMode.CASH_NET,
        )
        swap = Swap(
            equity_receiver=x,
            fixed_receiver=y,
            issuer="ABC",
            quantity=QTY,
            reference_price_per_share=S0,
            notional=parse_money("100000000.00"),
            fixed_rate=RATE,
            trade_date=TRADE_DATE,
            termination_date=SETTLE_DATE,
        )
        routes = [
            synthesize_long_stock("ABC", QTY, S0, RATE, TRADE_DATE, SETTLE_DATE, x, y),
            Portfolio(x, (position(x, loan), position(x, forward))),
            Portfolio(x, (position(x, loan), position(x, swap))),
            stock_portfolio(owner=x),
        ]
        for a in routes:
            for b in routes:
                assert economic_equivalence(a, b).equivalent


class TestTitleAudit:
    def test_cash_net_bundle_moves_nothing(self):
        audit = title_transfer_audit(canonical_bundle())
        assert not audit.moves_title
        assert audit.movers == ()

    def test_stock_moves_title(self):
        audit = title_transfer_audit(stock_portfolio())
        assert audit.moves_title

    def test_physical_call_moves_title(self, x, y):
        physical = make_option(
            OptionKind.CALL, holder=x, writer=y, settlement=SettlementMode.PHYSICAL
        )
        audit = title_transfer_audit(Portfolio(x, (position(x, physical),)))
        assert audit.moves_title


class TestDetector:
    def test_bundle_is_constructive_long(self):
        verdict = detect_constructive_trade(canonical_bundle(), "ABC")
        assert verdict.kind is VerdictKind.CONSTRUCTIVE_TRADE
        assert verdict.quantity == QTY
        assert verdict.direction is Side.LONG
        assert verdict.exact_match

    def test_outright_purchase_is_actual(self):
        verdict = detect_constructive_trade(stock_portfolio(), "ABC")
        assert verdict.kind is VerdictKind.ACTUAL_TRADE
        assert verdict.quantity == QTY

    def test_short_stock_is_actual_short(self):
        verdict = detect_constructive_trade(stock_portfolio(side=Side.SHORT), "ABC")
        assert verdict.kind is VerdictKind.ACTUAL_TRADE
        assert verdict.direction is Side.SHORT

    def test_pure_loan_is_no_exposure(self, loan):
        verdict = detect_constructive_trade(Portfolio(X, (position(X, loan),)), "ABC")
        assert verdict.kind is VerdictKind.NO_EXPOSURE

    def test_lone_option_is_not_a_constructive_trade(self, x, y):
        call = make_option(OptionKind.CALL, holder=x, writer=y)
        verdict = detect_constructive_trade(Portfolio(x, (position(x, call),)), "ABC")
        assert verdict.kind is VerdictKind.NO_EXPOSURE
        assert not verdict.exact_match

    def test_other_issuer_positions_ignored(self, x, y):
        other = make_option(OptionKind.CALL, holder=x, writer=y, issuer="XYZ")
        positions = canonical_bundle().positions + (position(x, other),)
        verdict = detect_constructive_trade(Portfolio(x, positions), "ABC")
        assert verdict.kind is VerdictKind.CONSTRUCTIVE_TRADE
        assert verdict.quantity == QTY

    def test_scale_covariance(self):
        small = canonical_bundle()
        big = synthesize_long_stock("ABC", 2 * QTY, S0, RATE, TRADE_DATE, SETTLE_DATE, X, Y)
        v_small = detect_constructive_trade(small, "ABC")
        v_big = detect_constructive_trade(big, "ABC")
        assert v_small.kind is v_big.kind is VerdictKind.CONSTRUCTIVE_TRADE
        assert v_big.quantity == 2 * v_small.quantity
        profile_small = payoff_profile(small)
        profile_big = payoff_profile(big)
        for units in (0, 5_000, 10_500, 20_000):
            assert profile_big.value_at(Money(units)).minor_units == (
                2 * profile_small.value_at(Money(units)).minor_units
            )


class TestProfileOracle:
    def test_random_portfolios_match_brute_force(self):
        rng = random.Random(20160104)
        for _ in range(25):
            portfolio = random_portfolio(rng, X, Y)
            profile = payoff_profile(portfolio)
            top = 3 * max(profile.breakpoints, default=10_000)
            for units in range(0, top + 1, 100):
                assert profile.value_at(Money(units)) == portfolio_payoff(
                    portfolio, scenario_units(units)
                )

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_seeded_portfolio_profile_matches(self, seed):
        rng = random.Random(seed)
        portfolio = random_portfolio(rng, X, Y)
        profile = payoff_profile(portfolio)
        prices = [rng.randint(0, 40_000) for _ in range(10)]
        prices += list(profile.breakpoints)
        for units in prices:
            assert profile.value_at(Money(units)) == portfolio_payoff(
                portfolio, scenario_units(units)
            )
