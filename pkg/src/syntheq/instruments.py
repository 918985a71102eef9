"""Contract data model: parties, instruments, positions, portfolios.

All types are immutable values. ``validate_contract`` checks every
structural invariant and raises ``ContractError`` naming the first
violation; validating an already valid instrument returns it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .money import Money, Rate, format_money, format_rate, mul_exact


class ContractError(ValueError):
    """A contract violates one of its structural invariants."""


class InsiderRole(Enum):
    PRIMARY_INSIDER = "primary_insider"
    SECONDARY_INSIDER = "secondary_insider"
    NOT_INSIDER = "not_insider"


class OptionKind(Enum):
    CALL = "call"
    PUT = "put"


class ExerciseStyle(Enum):
    EUROPEAN = "european"
    AMERICAN = "american"


class SettlementMode(Enum):
    PHYSICAL = "physical"
    CASH_NET = "cash_net"


class Side(Enum):
    LONG = "long"
    SHORT = "short"


@dataclass(frozen=True, slots=True)
class Party:
    id: str
    role: InsiderRole = InsiderRole.NOT_INSIDER


@dataclass(frozen=True, slots=True)
class Stock:
    """A block of shares; holding or transferring it always moves title."""

    issuer: str
    quantity: int
    settlement: SettlementMode = SettlementMode.PHYSICAL


@dataclass(frozen=True, slots=True)
class Loan:
    lender: Party
    borrower: Party
    principal: Money
    rate: Rate
    trade_date: date
    maturity: date


@dataclass(frozen=True, slots=True)
class Option:
    kind: OptionKind
    style: ExerciseStyle
    holder: Party
    writer: Party
    issuer: str
    quantity: int
    strike_per_share: Money
    trade_date: date
    exercise_date: date
    settlement: SettlementMode = SettlementMode.CASH_NET
    premium: Money = Money(0)


@dataclass(frozen=True, slots=True)
class Forward:
    buyer: Party
    seller: Party
    issuer: str
    quantity: int
    delivery_price_per_share: Money
    trade_date: date
    delivery_date: date
    settlement: SettlementMode = SettlementMode.CASH_NET


@dataclass(frozen=True, slots=True)
class Swap:
    """Equity-for-fixed swap: one leg pays the share-price return on
    ``quantity`` shares, the other a fixed yield on the notional."""

    equity_receiver: Party
    fixed_receiver: Party
    issuer: str
    quantity: int
    reference_price_per_share: Money
    notional: Money
    fixed_rate: Rate
    trade_date: date
    termination_date: date


Instrument = Stock | Loan | Option | Forward | Swap


def _check(condition: bool, violation: str) -> None:
    if not condition:
        raise ContractError(violation)


def validate_contract(instrument: Instrument) -> Instrument:
    """Check all invariants of one instrument; idempotent on valid input."""
    if isinstance(instrument, Stock):
        _check(instrument.quantity > 0, f"stock quantity must be positive, got {instrument.quantity}")
        _check(
            instrument.settlement is SettlementMode.PHYSICAL,
            "stock holdings settle physically by definition",
        )
    elif isinstance(instrument, Loan):
        _check(instrument.lender != instrument.borrower, "loan lender and borrower must differ")
        _check(
            instrument.principal.minor_units > 0,
            f"loan principal must be positive, got {instrument.principal}",
        )
        _check(instrument.rate >= 0, f"loan rate must be nonnegative, got {instrument.rate}")
        _check(
            instrument.maturity > instrument.trade_date,
            f"loan maturity {instrument.maturity} must be strictly after trade date {instrument.trade_date}",
        )
    elif isinstance(instrument, Option):
        _check(instrument.holder != instrument.writer, "option holder and writer must differ")
        _check(instrument.quantity > 0, f"option quantity must be positive, got {instrument.quantity}")
        _check(
            instrument.strike_per_share.minor_units >= 0,
            f"strike must be nonnegative, got {instrument.strike_per_share}",
        )
        _check(
            instrument.exercise_date > instrument.trade_date,
            f"exercise date {instrument.exercise_date} must be strictly after trade date {instrument.trade_date}",
        )
        _check(
            instrument.premium.minor_units >= 0,
            f"premium must be nonnegative, got {instrument.premium}",
        )
        if instrument.premium.minor_units != 0:
            _check(
                instrument.premium.currency == instrument.strike_per_share.currency,
                "premium currency must match strike currency",
            )
    elif isinstance(instrument, Forward):
        _check(instrument.buyer != instrument.seller, "forward buyer and seller must differ")
        _check(instrument.quantity > 0, f"forward quantity must be positive, got {instrument.quantity}")
        _check(
            instrument.delivery_price_per_share.minor_units >= 0,
            f"delivery price must be nonnegative, got {instrument.delivery_price_per_share}",
        )
        _check(
            instrument.delivery_date > instrument.trade_date,
            f"delivery date {instrument.delivery_date} must be strictly after trade date {instrument.trade_date}",
        )
    elif isinstance(instrument, Swap):
        _check(
            instrument.equity_receiver != instrument.fixed_receiver,
            "swap legs must have distinct parties",
        )
        _check(instrument.quantity > 0, f"swap quantity must be positive, got {instrument.quantity}")
        _check(
            instrument.reference_price_per_share.minor_units >= 0,
            f"reference price must be nonnegative, got {instrument.reference_price_per_share}",
        )
        _check(
            instrument.notional.currency == instrument.reference_price_per_share.currency,
            "swap notional currency must match reference price currency",
        )
        _check(
            instrument.notional == instrument.reference_price_per_share * instrument.quantity,
            f"swap notional {instrument.notional} must equal reference price x quantity "
            f"{instrument.reference_price_per_share * instrument.quantity}",
        )
        _check(
            instrument.termination_date > instrument.trade_date,
            f"termination date {instrument.termination_date} must be strictly after trade date {instrument.trade_date}",
        )
    else:
        raise ContractError(f"unknown instrument type {type(instrument).__name__}")
    return instrument


def loan_maturity_value(loan: Loan) -> Money:
    """Principal plus simple interest for the single loan period."""
    return loan.principal + mul_exact(loan.rate, loan.principal)


def underlying_issuer(instrument: Instrument) -> str | None:
    """Issuer of the equity the instrument is linked to; None for loans."""
    if isinstance(instrument, Loan):
        return None
    return instrument.issuer


def long_short_parties(instrument: Instrument) -> tuple[Party, Party] | None:
    """(long party, short party) for party-bearing instruments.

    Long means: lender of a loan, holder of an option, buyer of a
    forward, equity receiver of a swap. Stock carries no parties.
    """
    if isinstance(instrument, Loan):
        return instrument.lender, instrument.borrower
    if isinstance(instrument, Option):
        return instrument.holder, instrument.writer
    if isinstance(instrument, Forward):
        return instrument.buyer, instrument.seller
    if isinstance(instrument, Swap):
        return instrument.equity_receiver, instrument.fixed_receiver
    return None


def describe(instrument: Instrument) -> str:
    if isinstance(instrument, Stock):
        return f"{instrument.quantity:,} {instrument.issuer} shares"
    if isinstance(instrument, Loan):
        return (
            f"loan of {format_money(instrument.principal)} at {format_rate(instrument.rate)}"
            f" due {instrument.maturity.isoformat()}"
        )
    if isinstance(instrument, Option):
        return (
            f"{instrument.style.value} {instrument.kind.value} on {instrument.quantity:,} "
            f"{instrument.issuer} at {format_money(instrument.strike_per_share)}/share"
        )
    if isinstance(instrument, Forward):
        return (
            f"forward on {instrument.quantity:,} {instrument.issuer} at "
            f"{format_money(instrument.delivery_price_per_share)}/share"
        )
    if isinstance(instrument, Swap):
        return (
            f"equity swap on {instrument.quantity:,} {instrument.issuer}, notional "
            f"{format_money(instrument.notional)} at {format_rate(instrument.fixed_rate)}"
        )
    return type(instrument).__name__


@dataclass(frozen=True, slots=True)
class Position:
    owner: Party
    instrument: Instrument
    side: Side


def derive_side(owner: Party, instrument: Instrument) -> Side:
    """Side implied by the owner's role inside the instrument."""
    parties = long_short_parties(instrument)
    if parties is None:
        raise ContractError(
            f"{type(instrument).__name__} names no parties; pass the side explicitly"
        )
    long_party, short_party = parties
    if owner == long_party:
        return Side.LONG
    if owner == short_party:
        return Side.SHORT
    raise ContractError(f"party {owner.id!r} is not a party to {describe(instrument)}")


def position(owner: Party, instrument: Instrument, side: Side | None = None) -> Position:
    """Build a position, deriving or checking the side against the
    owner's role inside the instrument."""
    validate_contract(instrument)
    if isinstance(instrument, Stock):
        return Position(owner, instrument, side if side is not None else Side.LONG)
    derived = derive_side(owner, instrument)
    if side is not None and side is not derived:
        raise ContractError(
            f"party {owner.id!r} is {derived.value} {describe(instrument)}, not {side.value}"
        )
    return Position(owner, instrument, derived)


@dataclass(frozen=True, slots=True)
class Portfolio:
    owner: Party
    positions: tuple[Position, ...]

    def __post_init__(self) -> None:
        for pos in self.positions:
            if pos.owner != self.owner:
                raise ContractError(
                    f"all positions must share owner {self.owner.id!r}, found {pos.owner.id!r}"
                )


@dataclass(frozen=True, slots=True)
class InsiderRelations:
    """Issuer affiliations and tip edges used to classify parties.

    ``position_holders`` are party ids that hold a position of power in
    the issuer (directors, officers); ``tips`` are directed
    (tipper, tippee) communication edges.
    """

    issuer: str
    position_holders: frozenset[str]
    tips: tuple[tuple[str, str], ...] = ()


def _reject_cycles(tips: tuple[tuple[str, str], ...]) -> None:
    adjacency: dict[str, list[str]] = {}
    for tipper, tippee in tips:
        adjacency.setdefault(tipper, []).append(tippee)
    done: set[str] = set()
    for start in adjacency:
        if start in done:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        on_path = {start}
        while stack:
            node, i = stack[-1]
            nxt = adjacency.get(node, [])
            if i < len(nxt):
                stack[-1] = (node, i + 1)
                child = nxt[i]
                if child in on_path:
                    raise ContractError(f"cyclic tip chain through {child!r}")
                if child not in done:
                    stack.append((child, 0))
                    on_path.add(child)
            else:
                stack.pop()
                on_path.discard(node)
                done.add(node)


def classify_insider(party: Party, relations: InsiderRelations) -> InsiderRole:
    """Position holders are primary insiders; anyone reachable from a
    primary insider through one or more tip edges is secondary."""
    _reject_cycles(relations.tips)
    if party.id in relations.position_holders:
        return InsiderRole.PRIMARY_INSIDER
    adjacency: dict[str, list[str]] = {}
    for tipper, tippee in relations.tips:
        adjacency.setdefault(tipper, []).append(tippee)
    frontier = list(relations.position_holders)
    reached: set[str] = set()
    while frontier:
        node = frontier.pop()
        for child in adjacency.get(node, []):
            if child not in reached:
                reached.add(child)
                frontier.append(child)
    if party.id in reached:
        return InsiderRole.SECONDARY_INSIDER
    return InsiderRole.NOT_INSIDER
