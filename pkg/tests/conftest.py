from datetime import date

import pytest

import random

from syntheq import (
    ExerciseStyle,
    Forward,
    Loan,
    Money,
    Option,
    OptionKind,
    Party,
    Portfolio,
    PriceScenario,
    SettlementMode,
    Side,
    Stock,
    Swap,
    make_rate,
    parse_money,
    position,
)

TRADE_DATE = date(2015, 1, 4)
SETTLE_DATE = date(2016, 1, 4)
QTY = 1_000_000


@pytest.fixture
def x():
    return Party("X")


@pytest.fixture
def y():
    return Party("Y")


@pytest.fixture
def loan(x, y):
    return Loan(
        lender=x,
        borrower=y,
        principal=parse_money("100000000.00"),
        rate=make_rate(5, 100),
        trade_date=TRADE_DATE,
        maturity=SETTLE_DATE,
    )


def make_option(kind, holder, writer, strike="105.00", qty=QTY, **overrides):
    fields = dict(
        kind=kind,
        style=ExerciseStyle.EUROPEAN,
        holder=holder,
        writer=writer,
        issuer="ABC",
        quantity=qty,
        strike_per_share=parse_money(strike),
        trade_date=TRADE_DATE,
        exercise_date=SETTLE_DATE,
        settlement=SettlementMode.CASH_NET,
    )
    fields.update(overrides)
    return Option(**fields)


@pytest.fixture
def call(x, y):
    return make_option(OptionKind.CALL, holder=x, writer=y)


@pytest.fixture
def put(x, y):
    return make_option(OptionKind.PUT, holder=y, writer=x)


def scenario(price: str, initial: str = "100.00") -> PriceScenario:
    return PriceScenario(
        issuer="ABC",
        terminal_date=SETTLE_DATE,
        terminal_price_per_share=parse_money(price),
        initial_price_per_share=parse_money(initial),
    )


def scenario_units(units: int, initial: str = "100.00") -> PriceScenario:
    return PriceScenario(
        issuer="ABC",
        terminal_date=SETTLE_DATE,
        terminal_price_per_share=Money(units),
        initial_price_per_share=parse_money(initial),
    )


def random_portfolio(rng: random.Random, owner: Party, counterparty: Party) -> Portfolio:
    """Random mixture of cash-settled instruments on one issuer/date."""
    positions = []
    for _ in range(rng.randint(1, 6)):
        qty = rng.randint(1, 500)
        kind = rng.choice(("stock", "loan", "call", "put", "forward", "swap"))
        if kind == "stock":
            instrument = Stock("ABC", qty)
            side = rng.choice((Side.LONG, Side.SHORT))
            positions.append(position(owner, instrument, side))
            continue
        if kind == "loan":
            principal = Money(rng.randint(1, 10_000) * 20)
            parties = (owner, counterparty) if rng.random() < 0.5 else (counterparty, owner)
            instrument = Loan(parties[0], parties[1], principal, make_rate(rng.randint(0, 20), 20), TRADE_DATE, SETTLE_DATE)
        elif kind in ("call", "put"):
            option_kind = OptionKind.CALL if kind == "call" else OptionKind.PUT
            holder, writer = (owner, counterparty) if rng.random() < 0.5 else (counterparty, owner)
            instrument = make_option(
                option_kind, holder=holder, writer=writer, qty=qty,
                strike_per_share=Money(rng.randint(0, 300) * 100),
            )
        elif kind == "forward":
            buyer, seller = (owner, counterparty) if rng.random() < 0.5 else (counterparty, owner)
            instrument = Forward(
                buyer=buyer,
                seller=seller,
                issuer="ABC",
                quantity=qty,
                delivery_price_per_share=Money(rng.randint(0, 300) * 100),
                trade_date=TRADE_DATE,
                delivery_date=SETTLE_DATE,
                settlement=SettlementMode.CASH_NET,
            )
        else:
            reference = Money(rng.randint(0, 300) * 100)
            receiver, payer = (owner, counterparty) if rng.random() < 0.5 else (counterparty, owner)
            instrument = Swap(
                equity_receiver=receiver,
                fixed_receiver=payer,
                issuer="ABC",
                quantity=qty,
                reference_price_per_share=reference,
                notional=reference * qty,
                fixed_rate=make_rate(rng.randint(0, 10), 10) if reference.minor_units % 10 == 0 else make_rate(0, 1),
                trade_date=TRADE_DATE,
                termination_date=SETTLE_DATE,
            )
        positions.append(position(owner, instrument))
    return Portfolio(owner, tuple(positions))
