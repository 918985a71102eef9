"""Terminal payoff evaluation at a given terminal share price.

Every function is pure and exact. Option payoffs assume rational
exercise: an option is exercised iff strictly in the money, and at the
strike the payoff is zero either way. Premiums are upfront flows and do
not enter terminal payoffs.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .instruments import (
    ExerciseStyle,
    Forward,
    Instrument,
    Loan,
    Option,
    OptionKind,
    Party,
    Portfolio,
    SettlementMode,
    Side,
    Stock,
    Swap,
    describe,
    loan_maturity_value,
    validate_contract,
)
from .money import Money, mul_exact

__all__ = [
    "PriceScenario",
    "Payoff",
    "PayoffError",
    "payoff_call",
    "payoff_put",
    "payoff_stock",
    "payoff_forward",
    "payoff_swap",
    "loan_maturity_value",
    "portfolio_payoff",
    "instrument_value",
    "direct_trade_gain",
]


class PayoffError(ValueError):
    """A payoff cannot be evaluated for the given instrument/scenario."""


@dataclass(frozen=True, slots=True)
class PriceScenario:
    """Terminal price of one issuer's shares on the terminal date."""

    issuer: str
    terminal_date: date
    terminal_price_per_share: Money
    initial_price_per_share: Money

    def __post_init__(self) -> None:
        if self.terminal_price_per_share.minor_units < 0:
            raise PayoffError(f"terminal price must be nonnegative, got {self.terminal_price_per_share}")
        if self.initial_price_per_share.minor_units < 0:
            raise PayoffError(f"initial price must be nonnegative, got {self.initial_price_per_share}")
        if self.terminal_price_per_share.currency != self.initial_price_per_share.currency:
            raise PayoffError("scenario prices must share one currency")


@dataclass(frozen=True, slots=True)
class Payoff:
    """Signed terminal amount due to one party; the counterparty owes
    exactly the negation."""

    party: Party
    amount: Money


def _check_option(scenario: PriceScenario, option: Option, kind: OptionKind) -> None:
    validate_contract(option)
    if option.kind is not kind:
        raise PayoffError(f"expected a {kind.value} option, got {option.kind.value}")
    if option.style is ExerciseStyle.AMERICAN:
        raise PayoffError(
            "american-style options have no single terminal exercise price; only european options are evaluated"
        )
    if option.issuer != scenario.issuer:
        raise PayoffError(f"scenario covers {scenario.issuer}, option is on {option.issuer}")
    if option.exercise_date != scenario.terminal_date:
        raise PayoffError(
            f"scenario date {scenario.terminal_date} does not match exercise date {option.exercise_date}"
        )


def payoff_call(scenario: PriceScenario, option: Option) -> Payoff:
    """quantity x max(S_T - K, 0) to the holder."""
    _check_option(scenario, option, OptionKind.CALL)
    s_t = scenario.terminal_price_per_share
    strike = option.strike_per_share
    intrinsic = (s_t - strike) * option.quantity if s_t > strike else Money(0, s_t.currency)
    return Payoff(option.holder, intrinsic)


def payoff_put(scenario: PriceScenario, option: Option) -> Payoff:
    """quantity x max(K - S_T, 0) to the holder."""
    _check_option(scenario, option, OptionKind.PUT)
    s_t = scenario.terminal_price_per_share
    strike = option.strike_per_share
    intrinsic = (strike - s_t) * option.quantity if s_t < strike else Money(0, s_t.currency)
    return Payoff(option.holder, intrinsic)


def payoff_stock(scenario: PriceScenario, stock: Stock) -> Money:
    """Market value of the holding at the terminal price."""
    if stock.issuer != scenario.issuer:
        raise PayoffError(f"scenario covers {scenario.issuer}, stock is {stock.issuer}")
    return scenario.terminal_price_per_share * stock.quantity


def payoff_forward(scenario: PriceScenario, fwd: Forward) -> Payoff:
    """quantity x (S_T - delivery price), signed, to the buyer."""
    validate_contract(fwd)
    if fwd.settlement is not SettlementMode.CASH_NET:
        raise PayoffError(
            "physically settled forwards deliver shares; settle them through the settlement pipeline"
        )
    if fwd.issuer != scenario.issuer:
        raise PayoffError(f"scenario covers {scenario.issuer}, forward is on {fwd.issuer}")
    if fwd.delivery_date != scenario.terminal_date:
        raise PayoffError(
            f"scenario date {scenario.terminal_date} does not match delivery date {fwd.delivery_date}"
        )
    amount = (scenario.terminal_price_per_share - fwd.delivery_price_per_share) * fwd.quantity
    return Payoff(fwd.buyer, amount)


def payoff_swap(scenario: PriceScenario, swap: Swap) -> Payoff:
    """Equity leg minus fixed leg, signed, to the equity receiver.

    quantity x (S_T - reference price) - fixed_rate x notional
    """
    validate_contract(swap)
    if swap.issuer != scenario.issuer:
        raise PayoffError(f"scenario covers {scenario.issuer}, swap is on {swap.issuer}")
    if swap.termination_date != scenario.terminal_date:
        raise PayoffError(
            f"scenario date {scenario.terminal_date} does not match termination date {swap.termination_date}"
        )
    equity_leg = (scenario.terminal_price_per_share - swap.reference_price_per_share) * swap.quantity
    fixed_leg = mul_exact(swap.fixed_rate, swap.notional)
    return Payoff(swap.equity_receiver, equity_leg - fixed_leg)


def instrument_value(scenario: PriceScenario, instrument: Instrument) -> Money:
    """Long-side terminal value of one instrument."""
    if isinstance(instrument, Stock):
        return payoff_stock(scenario, instrument)
    if isinstance(instrument, Loan):
        if instrument.maturity > scenario.terminal_date:
            raise PayoffError(
                f"loan matures {instrument.maturity}, after scenario date {scenario.terminal_date}"
            )
        return loan_maturity_value(instrument)
    if isinstance(instrument, Option):
        if instrument.settlement is not SettlementMode.CASH_NET:
            raise PayoffError(
                "physically settled options deliver shares; settle them through the settlement pipeline"
            )
        if instrument.kind is OptionKind.CALL:
            return payoff_call(scenario, instrument).amount
        return payoff_put(scenario, instrument).amount
    if isinstance(instrument, Forward):
        return payoff_forward(scenario, instrument).amount
    if isinstance(instrument, Swap):
        return payoff_swap(scenario, instrument).amount
    raise PayoffError(f"unsupported instrument {type(instrument).__name__}")


def portfolio_payoff(portfolio: Portfolio, scenario: PriceScenario) -> Money:
    """Signed sum of per-position terminal amounts from the owner's side.

    Loans count at maturity value (owed to a long/lender owner, owed by
    a short/borrower owner); stock counts at market value.
    """
    total = Money(0, scenario.terminal_price_per_share.currency)
    for index, pos in enumerate(portfolio.positions):
        try:
            value = instrument_value(scenario, pos.instrument)
        except (PayoffError, ArithmeticError, ValueError) as exc:
            raise PayoffError(
                f"position {index} ({describe(pos.instrument)}): {exc}"
            ) from exc
        total = total + value if pos.side is Side.LONG else total - value
    return total


def direct_trade_gain(quantity: int, acquisition_price: Money, selling_price: Money) -> Money:
    """Gain from buying ``quantity`` shares at one price and selling at
    another: quantity x (sell - buy)."""
    if quantity < 0:
        raise PayoffError(f"quantity must be nonnegative, got {quantity}")
    return (selling_price - acquisition_price) * quantity
