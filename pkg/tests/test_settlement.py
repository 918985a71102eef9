import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syntheq import (
    CompensationRequisiteError,
    Deliver,
    ExerciseDecision,
    LedgerEntry,
    Money,
    OptionKind,
    Party,
    Pay,
    SettlementLedger,
    SettlementState,
    StateMachineError,
    exercise_decision,
    legal_compensation,
    novate_to_cash,
    open_ledger,
    parse_money,
    perfect,
    settle,
    settle_physical_purchase,
)
from syntheq.instruments import SettlementMode

from conftest import QTY, make_option, scenario, scenario_units


class TestExerciseDecision:
    def test_call_exercised_above_strike(self, call):
        assert exercise_decision(call, scenario("150.00")) is ExerciseDecision.EXERCISE

    def test_put_exercised_below_strike(self, put):
        assert exercise_decision(put, scenario("80.00")) is ExerciseDecision.EXERCISE

    def test_both_expire_at_the_strike(self, call, put):
        assert exercise_decision(call, scenario("105.00")) is ExerciseDecision.EXPIRE
        assert exercise_decision(put, scenario("105.00")) is ExerciseDecision.EXPIRE

    def test_date_mismatch_rejected(self, call):
        from datetime import date

        early = scenario("150.00")
        early = type(early)(
            issuer="ABC",
            terminal_date=date(2015, 6, 1),
            terminal_price_per_share=early.terminal_price_per_share,
            initial_price_per_share=early.initial_price_per_share,
        )
        with pytest.raises(Exception, match="exercise date"):
            exercise_decision(call, early)


class TestPerfect:
    def test_exercised_call_adds_reciprocal_pair(self, x, y, loan, call):
        ledger = open_ledger(scenario("150.00"), loan)
        after = perfect(ledger, call, ExerciseDecision.EXERCISE)
        added = [e for e in after.entries if e.source == call]
        assert len(added) == 2
        pay = next(e for e in added if isinstance(e.obligation, Pay))
        deliver = next(e for e in added if isinstance(e.obligation, Deliver))
        assert pay.debtor == x and pay.creditor == y
        assert pay.obligation.amount == parse_money("105000000.00")
        assert deliver.debtor == y and deliver.creditor == x
        assert deliver.obligation == Deliver("ABC", QTY)
        assert all(e.state is SettlementState.PERFECTION for e in added)

    def test_exercised_put_reverses_roles(self, x, y, put):
        ledger = open_ledger(scenario("80.00"))
        after = perfect(ledger, put, ExerciseDecision.EXERCISE)
        pay = next(e for e in after.entries if isinstance(e.obligation, Pay))
        deliver = next(e for e in after.entries if isinstance(e.obligation, Deliver))
        assert pay.debtor == x and pay.creditor == y
        assert deliver.debtor == y and deliver.creditor == x

    def test_expire_leaves_ledger_unchanged(self, loan, call):
        ledger = open_ledger(scenario("105.00"), loan)
        assert perfect(ledger, call, ExerciseDecision.EXPIRE) == ledger

    def test_double_perfection_rejected(self, loan, call):
        ledger = open_ledger(scenario("150.00"), loan)
        once = perfect(ledger, call, ExerciseDecision.EXERCISE)
        with pytest.raises(StateMachineError, match="already"):
            perfect(once, call, ExerciseDecision.EXERCISE)


class TestNovation:
    def test_delivery_becomes_terminal_value(self, loan, call):
        ledger = perfect(open_ledger(scenario("150.00"), loan), call, ExerciseDecision.EXERCISE)
        novated = novate_to_cash(ledger)
        assert not any(isinstance(e.obligation, Deliver) for e in novated.entries)
        cash = [
            e
            for e in novated.entries
            if e.source == call and e.debtor.id == "Y" and isinstance(e.obligation, Pay)
        ]
        assert cash and cash[0].obligation.amount == parse_money("150000000.00")

    def test_put_branch_delivery(self, loan, put):
        ledger = perfect(open_ledger(scenario("80.00"), loan), put, ExerciseDecision.EXERCISE)
        novated = novate_to_cash(ledger)
        cash = [
            e
            for e in novated.entries
            if e.source == put and e.debtor.id == "Y" and isinstance(e.obligation, Pay)
        ]
        assert cash and cash[0].obligation.amount == parse_money("80000000.00")

    def test_physical_option_refuses_novation(self, x, y):
        physical = make_option(
            OptionKind.CALL, holder=x, writer=y, settlement=SettlementMode.PHYSICAL
        )
        ledger = perfect(open_ledger(scenario("150.00")), physical, ExerciseDecision.EXERCISE)
        with pytest.raises(Exception, match="physically"):
            novate_to_cash(ledger)

    def test_untouched_entries_survive(self, loan, call):
        ledger = perfect(open_ledger(scenario("150.00"), loan), call, ExerciseDecision.EXERCISE)
        novated = novate_to_cash(ledger)
        loan_entries = [e for e in novated.entries if e.source == loan]
        assert loan_entries == [e for e in ledger.entries if e.source == loan]


class TestLegalCompensation:
    def test_nets_to_single_payment_from_larger_debtor(self, x, y, loan, call):
        ledger = novate_to_cash(
            perfect(open_ledger(scenario("150.00"), loan), call, ExerciseDecision.EXERCISE)
        )
        netted = legal_compensation(ledger)
        residual = [e for e in netted.entries if e.source is None]
        assert len(residual) == 1
        entry = residual[0]
        assert entry.debtor == y and entry.creditor == x
        assert entry.obligation == Pay(parse_money("150000000.00"))
        assert entry.state is SettlementState.CONSUMMATION
        assert all(e.state is SettlementState.CONSUMMATION for e in netted.entries)

    def test_deliver_entry_violates_money_requisite(self, loan, call):
        ledger = perfect(open_ledger(scenario("150.00"), loan), call, ExerciseDecision.EXERCISE)
        with pytest.raises(CompensationRequisiteError, match=r"1279\(2\)"):
            legal_compensation(ledger)

    def test_equal_mutual_debts_extinguish_fully(self, x, y):
        sc = scenario("100.00")
        amount = Pay(parse_money("7.00"))
        entries = (
            LedgerEntry(x, y, amount, None, SettlementState.PERFECTION),
            LedgerEntry(y, x, amount, None, SettlementState.PERFECTION),
        )
        netted = legal_compensation(SettlementLedger(sc, entries))
        assert all(e.state is SettlementState.CONSUMMATION for e in netted.entries)
        assert len(netted.entries) == 2  # both consumed, no residual

    def test_order_independence(self, x, y, loan, call, put):
        base = novate_to_cash(
            perfect(open_ledger(scenario("150.00"), loan), call, ExerciseDecision.EXERCISE)
        )
        rng = random.Random(7)
        reference = None
        for _ in range(10):
            shuffled = list(base.entries)
            rng.shuffle(shuffled)
            netted = legal_compensation(base.with_entries(tuple(shuffled)))
            residual = sorted(
                (e.debtor.id, e.creditor.id, e.obligation.amount.minor_units)
                for e in netted.entries
                if e.source is None
            )
            if reference is None:
                reference = residual
            assert residual == reference


class TestStateMachine:
    def test_regression_rejected(self, x, y):
        entry = LedgerEntry(x, y, Pay(Money(100)), None, SettlementState.PERFECTION)
        with pytest.raises(StateMachineError):
            entry.advanced(SettlementState.NEGOTIATION)

    def test_skip_rejected(self, x, y):
        entry = LedgerEntry(x, y, Pay(Money(100)), None, SettlementState.NEGOTIATION)
        with pytest.raises(StateMachineError):
            entry.advanced(SettlementState.CONSUMMATION)

    def test_single_step_forward_allowed(self, x, y):
        entry = LedgerEntry(x, y, Pay(Money(100)), None, SettlementState.NEGOTIATION)
        perfected = entry.advanced(SettlementState.PERFECTION)
        assert perfected.state is SettlementState.PERFECTION
        assert perfected.advanced(SettlementState.CONSUMMATION).state is SettlementState.CONSUMMATION


class TestSettle:
    def test_rise_branch(self, loan, call, put):
        result = settle(loan, call, put, scenario("150.00"))
        assert result.net_value("X") == parse_money("150000000.00")
        assert result.net_value("Y") == Money(0)
        assert result.positions["X"].title_transferred is False
        assert result.positions["Y"].title_transferred is False
        assert result.decisions["call"] is ExerciseDecision.EXERCISE
        assert result.decisions["put"] is ExerciseDecision.EXPIRE

    def test_fall_branch(self, loan, call, put):
        result = settle(loan, call, put, scenario("80.00"))
        assert result.net_value("X") == parse_money("80000000.00")
        assert result.net_value("Y") == Money(0)
        assert result.decisions["put"] is ExerciseDecision.EXERCISE

    def test_flat_branch(self, loan, call, put):
        result = settle(loan, call, put, scenario("105.00"))
        assert result.net_value("X") == parse_money("105000000.00")
        assert result.net_value("Y") == Money(0)
        assert result.decisions == {
            "call": ExerciseDecision.EXPIRE,
            "put": ExerciseDecision.EXPIRE,
        }

    def test_stage_snapshots_in_order(self, loan, call, put):
        result = settle(loan, call, put, scenario("150.00"))
        assert [name for name, _ in result.stages] == [
            "inception",
            "perfection",
            "novation",
            "compensation",
        ]
        assert len(result.stage("perfection").entries) == 3

    def test_stage_errors_carry_stage_name(self, x, y, loan):
        physical_call = make_option(
            OptionKind.CALL, holder=x, writer=y, settlement=SettlementMode.PHYSICAL
        )
        put = make_option(OptionKind.PUT, holder=y, writer=x)
        with pytest.raises(Exception, match="novation stage"):
            settle(loan, physical_call, put, scenario("150.00"))

    @given(st.integers(0, 50_000))
    @settings(max_examples=100, deadline=None)
    def test_cash_conservation_and_dealer_neutrality(self, price_units):
        x, y = Party("X"), Party("Y")
        from syntheq import Loan, make_rate

        from conftest import SETTLE_DATE, TRADE_DATE

        loan = Loan(x, y, parse_money("100000000.00"), make_rate(5, 100), TRADE_DATE, SETTLE_DATE)
        call = make_option(OptionKind.CALL, holder=x, writer=y)
        put = make_option(OptionKind.PUT, holder=y, writer=x)
        result = settle(loan, call, put, scenario_units(price_units))
        total = sum(pos.net_cash.minor_units for pos in result.positions.values())
        assert total == 0
        assert result.net_value("Y") == Money(0)
        assert result.net_value("X") == Money(price_units) * QTY


class TestPhysicalPurchase:
    def test_title_moves_and_cash_nets_to_zero(self, x, y):
        positions = settle_physical_purchase("ABC", QTY, x, y, scenario("150.00"))
        assert positions["X"].title_transferred is True
        assert positions["Y"].title_transferred is True
        assert positions["X"].shares_held == {"ABC": QTY}
        total = sum(p.net_cash.minor_units for p in positions.values())
        assert total == 0
