"""Settlement pipeline: exercise -> perfection -> novation -> set-off.

The ledger is a value; each stage returns a new ledger. An option's
unaccepted promise creates no enforceable entry: entries appear when the
option is exercised (perfection), share-delivery obligations are novated
into their monetary equivalent (cash netting), and mutual money debts
between a party pair are then extinguished to a single net payment by
legal compensation. Expired options leave the ledger untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .instruments import (
    ExerciseStyle,
    Forward,
    Instrument,
    Loan,
    Option,
    OptionKind,
    Party,
    SettlementMode,
    describe,
    loan_maturity_value,
    validate_contract,
)
from .money import Money
from .payoff import PriceScenario


class SettlementError(RuntimeError):
    """A settlement stage cannot proceed."""


class StateMachineError(SettlementError):
    """An entry was asked to move backwards or skip a settlement stage."""


class NovationError(SettlementError):
    """A delivery obligation refuses substitution by its monetary equivalent."""


class CompensationRequisiteError(SettlementError):
    """A legal-compensation requisite fails.

    Set-off requires, among the Civil Code art. 1279 requisites, that
    both debts consist in a sum of money; a share-delivery obligation
    must be novated to cash first.
    """


class SettlementState(Enum):
    NEGOTIATION = 1
    PERFECTION = 2
    CONSUMMATION = 3


class ExerciseDecision(Enum):
    EXERCISE = "exercise"
    EXPIRE = "expire"


@dataclass(frozen=True, slots=True)
class Deliver:
    """Obligation to deliver a block of shares."""

    issuer: str
    quantity: int


@dataclass(frozen=True, slots=True)
class Pay:
    """Obligation to pay a (nonnegative) sum of money."""

    amount: Money

    def __post_init__(self) -> None:
        if self.amount.minor_units < 0:
            raise SettlementError(f"pay obligations cannot be negative, got {self.amount}")


Obligation = Deliver | Pay


@dataclass(frozen=True, slots=True)
class LedgerEntry:
    """One obligation: the debtor owes it, the creditor holds the
    mirror-image right. ``source`` is the originating instrument, or
    None for the net entry produced by compensation."""

    debtor: Party
    creditor: Party
    obligation: Obligation
    source: Instrument | None
    state: SettlementState

    def advanced(self, to: SettlementState) -> "LedgerEntry":
        """Move exactly one stage forward; anything else is rejected."""
        if to.value != self.state.value + 1:
            raise StateMachineError(
                f"cannot move entry from {self.state.name} to {to.name}; "
                "stages advance one step forward only"
            )
        return replace(self, state=to)


@dataclass(frozen=True, slots=True)
class SettlementLedger:
    scenario: PriceScenario
    entries: tuple[LedgerEntry, ...]

    def with_entries(self, entries: tuple[LedgerEntry, ...]) -> "SettlementLedger":
        return SettlementLedger(self.scenario, entries)


def open_ledger(scenario: PriceScenario, loan: Loan | None = None) -> SettlementLedger:
    """Fresh ledger; if a loan is given, its repayment (principal plus
    interest, due at maturity) is entered as a perfected obligation."""
    entries: tuple[LedgerEntry, ...] = ()
    if loan is not None:
        validate_contract(loan)
        entries = (
            LedgerEntry(
                debtor=loan.borrower,
                creditor=loan.lender,
                obligation=Pay(loan_maturity_value(loan)),
                source=loan,
                state=SettlementState.PERFECTION,
            ),
        )
    return SettlementLedger(scenario, entries)


def exercise_decision(option: Option, scenario: PriceScenario) -> ExerciseDecision:
    """Exercise iff strictly in the money; at S_T = K the option expires."""
    validate_contract(option)
    if option.style is not ExerciseStyle.EUROPEAN:
        raise SettlementError("only european options have a single exercise decision date")
    if option.issuer != scenario.issuer:
        raise SettlementError(f"scenario covers {scenario.issuer}, option is on {option.issuer}")
    if option.exercise_date != scenario.terminal_date:
        raise SettlementError(
            f"scenario date {scenario.terminal_date} is not the exercise date {option.exercise_date}"
        )
    s_t = scenario.terminal_price_per_share
    strike = option.strike_per_share
    if option.kind is OptionKind.CALL:
        in_the_money = s_t > strike
    else:
        in_the_money = s_t < strike
    return ExerciseDecision.EXERCISE if in_the_money else ExerciseDecision.EXPIRE


def perfect(
    ledger: SettlementLedger, option: Option, decision: ExerciseDecision
) -> SettlementLedger:
    """Record the bilateral obligations born when an option is exercised.

    The exercise turns the writer's unilateral promise into reciprocal
    obligations: the share buyer owes the strike, the share seller owes
    delivery. For a call the holder buys; for a put the holder sells.
    An expired option adds nothing.
    """
    validate_contract(option)
    if decision is ExerciseDecision.EXPIRE:
        return ledger
    if any(entry.source == option for entry in ledger.entries):
        raise StateMachineError(f"{describe(option)} was already perfected in this ledger")
    strike_total = option.strike_per_share * option.quantity
    if option.kind is OptionKind.CALL:
        share_buyer, share_seller = option.holder, option.writer
    else:
        share_buyer, share_seller = option.writer, option.holder
    new_entries = (
        LedgerEntry(
            debtor=share_buyer,
            creditor=share_seller,
            obligation=Pay(strike_total),
            source=option,
            state=SettlementState.PERFECTION,
        ),
        LedgerEntry(
            debtor=share_seller,
            creditor=share_buyer,
            obligation=Deliver(option.issuer, option.quantity),
            source=option,
            state=SettlementState.PERFECTION,
        ),
    )
    return ledger.with_entries(ledger.entries + new_entries)


def novate_to_cash(ledger: SettlementLedger) -> SettlementLedger:
    """Substitute each perfected share-delivery obligation with its
    monetary equivalent at the terminal price (objective novation).

    Only cash-netting contracts permit the substitution; a physically
    settled contract keeps its delivery obligation and errors here.
    """
    s_t = ledger.scenario.terminal_price_per_share
    out: list[LedgerEntry] = []
    for entry in ledger.entries:
        if not isinstance(entry.obligation, Deliver):
            out.append(entry)
            continue
        if entry.state is not SettlementState.PERFECTION:
            raise NovationError(
                f"delivery entry in {entry.state.name} cannot be novated; only perfected obligations can"
            )
        source = entry.source
        cash_ok = isinstance(source, (Option, Forward)) and source.settlement is SettlementMode.CASH_NET
        if not cash_ok:
            raise NovationError(
                f"{describe(source) if source is not None else 'entry'} settles physically; "
                "its delivery obligation cannot be novated to cash"
            )
        if entry.obligation.issuer != ledger.scenario.issuer:
            raise NovationError(
                f"scenario covers {ledger.scenario.issuer}, delivery is {entry.obligation.issuer}"
            )
        out.append(replace(entry, obligation=Pay(s_t * entry.obligation.quantity)))
    return ledger.with_entries(tuple(out))


def legal_compensation(ledger: SettlementLedger) -> SettlementLedger:
    """Extinguish mutual money debts per party pair down to one net payment.

    Requisites are checked, not assumed: every outstanding obligation
    must be a sum of money (a Deliver entry violates art. 1279(2) and
    errors), and mutual debts must be of the same currency. Consumed
    entries advance to consummation; the larger debtor of each pair owes
    the single net difference.
    """
    for entry in ledger.entries:
        if isinstance(entry.obligation, Deliver):
            raise CompensationRequisiteError(
                f"cannot set off {describe(entry.source) if entry.source else 'delivery entry'}: "
                "the debt is not a sum of money (art. 1279(2)); novate the delivery to cash first"
            )
    pairs: dict[frozenset[str], dict[str, Party]] = {}
    sums: dict[frozenset[str], dict[str, Money]] = {}
    consumed: list[LedgerEntry] = []
    for entry in ledger.entries:
        if entry.state is SettlementState.CONSUMMATION:
            consumed.append(entry)
            continue
        assert isinstance(entry.obligation, Pay)
        key = frozenset((entry.debtor.id, entry.creditor.id))
        pairs.setdefault(key, {})[entry.debtor.id] = entry.debtor
        pairs[key][entry.creditor.id] = entry.creditor
        by_debtor = sums.setdefault(key, {})
        amount = entry.obligation.amount
        if entry.debtor.id in by_debtor:
            try:
                by_debtor[entry.debtor.id] = by_debtor[entry.debtor.id] + amount
            except ValueError as exc:
                raise CompensationRequisiteError(
                    f"mutual debts between {entry.debtor.id} and {entry.creditor.id} "
                    f"are not of the same kind: {exc}"
                ) from exc
        else:
            by_debtor[entry.debtor.id] = amount
        consumed.append(entry.advanced(SettlementState.CONSUMMATION))
    residuals: list[LedgerEntry] = []
    for key in sorted(pairs, key=sorted):
        ids = sorted(pairs[key])
        if len(ids) == 1:
            # degenerate: party pair collapsed (should not arise)
            continue
        a, b = ids
        owed_by_a = sums[key].get(a)
        owed_by_b = sums[key].get(b)
        currency = (owed_by_a or owed_by_b).currency  # type: ignore[union-attr]
        total_a = owed_by_a if owed_by_a is not None else Money(0, currency)
        total_b = owed_by_b if owed_by_b is not None else Money(0, currency)
        try:
            net = total_a - total_b
        except ValueError as exc:
            raise CompensationRequisiteError(
                f"mutual debts between {a} and {b} are not of the same kind: {exc}"
            ) from exc
        if net.is_zero:
            continue
        debtor_id, creditor_id = (a, b) if net.minor_units > 0 else (b, a)
        residuals.append(
            LedgerEntry(
                debtor=pairs[key][debtor_id],
                creditor=pairs[key][creditor_id],
                obligation=Pay(Money(abs(net.minor_units), net.currency)),
                source=None,
                state=SettlementState.CONSUMMATION,
            )
        )
    return ledger.with_entries(tuple(consumed) + tuple(residuals))


@dataclass(frozen=True)
class NetPosition:
    """One party's final position: net cash after all stages, shares
    still held (marked nowhere here; see ``SettlementResult.net_value``),
    and whether any share title moved."""

    party: Party
    net_cash: Money
    shares_held: dict[str, int]
    title_transferred: bool


@dataclass(frozen=True)
class SettlementResult:
    scenario: PriceScenario
    decisions: dict[str, ExerciseDecision]
    stages: tuple[tuple[str, SettlementLedger], ...]
    positions: dict[str, NetPosition]

    def stage(self, name: str) -> SettlementLedger:
        for stage_name, ledger in self.stages:
            if stage_name == name:
                return ledger
        raise KeyError(name)

    def net_value(self, party_id: str) -> Money:
        """Net cash plus retained shares marked at the terminal price."""
        pos = self.positions[party_id]
        value = pos.net_cash
        for issuer, quantity in pos.shares_held.items():
            if issuer != self.scenario.issuer:
                raise SettlementError(f"no terminal price for issuer {issuer}")
            value = value + self.scenario.terminal_price_per_share * quantity
        return value


def settle(
    loan: Loan,
    call: Option,
    put: Option,
    scenario: PriceScenario,
    *,
    counterparty_shares: int | None = None,
) -> SettlementResult:
    """Run the full pipeline for the loan-plus-two-options construction.

    The lender/call-holder/put-writer is the beneficiary of the
    synthetic position; the borrower/call-writer/put-holder is the
    dealer, assumed to retain ``counterparty_shares`` of the issuer
    (defaulting to the option block) which are marked at the terminal
    price in the dealer's net position. Works whether or not the parity
    conditions hold; no share title ever moves on this path.
    """
    for instrument in (loan, call, put):
        validate_contract(instrument)
    if call.kind is not OptionKind.CALL or put.kind is not OptionKind.PUT:
        raise SettlementError("expected one call option and one put option")
    beneficiary = loan.lender
    dealer = loan.borrower
    if call.holder != beneficiary or call.writer != dealer:
        raise SettlementError("call parties must match the loan: lender holds, borrower writes")
    if put.holder != dealer or put.writer != beneficiary:
        raise SettlementError("put parties must match the loan: borrower holds, lender writes")
    if call.issuer != scenario.issuer or put.issuer != scenario.issuer:
        raise SettlementError(f"scenario covers {scenario.issuer}, options must match")
    if counterparty_shares is None:
        if call.quantity != put.quantity:
            raise SettlementError(
                "option quantities differ; pass counterparty_shares explicitly"
            )
        counterparty_shares = call.quantity

    def run_stage(name: str, fn, *args):
        try:
            return fn(*args)
        except SettlementError as exc:
            raise type(exc)(f"{name} stage: {exc}") from exc

    inception = open_ledger(scenario, loan)
    decisions = {
        "call": run_stage("exercise", exercise_decision, call, scenario),
        "put": run_stage("exercise", exercise_decision, put, scenario),
    }
    perfected = run_stage("perfection", perfect, inception, call, decisions["call"])
    perfected = run_stage("perfection", perfect, perfected, put, decisions["put"])
    novated = run_stage("novation", novate_to_cash, perfected)
    compensated = run_stage("compensation", legal_compensation, novated)

    cash: dict[str, Money] = {
        beneficiary.id: Money(0, scenario.terminal_price_per_share.currency),
        dealer.id: Money(0, scenario.terminal_price_per_share.currency),
    }
    for entry in compensated.entries:
        if entry.source is not None or not isinstance(entry.obligation, Pay):
            continue  # consumed entries; only net entries move cash
        cash[entry.creditor.id] = cash[entry.creditor.id] + entry.obligation.amount
        cash[entry.debtor.id] = cash[entry.debtor.id] - entry.obligation.amount
    positions = {
        beneficiary.id: NetPosition(beneficiary, cash[beneficiary.id], {}, False),
        dealer.id: NetPosition(
            dealer, cash[dealer.id], {scenario.issuer: counterparty_shares}, False
        ),
    }
    return SettlementResult(
        scenario=scenario,
        decisions=decisions,
        stages=(
            ("inception", inception),
            ("perfection", perfected),
            ("novation", novated),
            ("compensation", compensated),
        ),
        positions=positions,
    )


def settle_physical_purchase(
    stock_issuer: str, quantity: int, buyer: Party, seller: Party, scenario: PriceScenario
) -> dict[str, NetPosition]:
    """Outright purchase at the terminal price: cash against shares,
    title moves to the buyer."""
    if quantity <= 0:
        raise SettlementError(f"quantity must be positive, got {quantity}")
    price = scenario.terminal_price_per_share * quantity
    return {
        buyer.id: NetPosition(buyer, -price, {stock_issuer: quantity}, True),
        seller.id: NetPosition(seller, price, {}, True),
    }
