"""Put-call parity machinery and the constructive-trade detector.

Portfolio payoffs here are piecewise-linear functions of the terminal
per-share price with rational slopes, so equivalence is decided exactly
from breakpoints, slopes and the intercept rather than sampled within a
tolerance. The detector classifies a portfolio against a reference
security: exposure that matches holding (or shorting) a fixed number of
shares exactly is an actual trade when title moves with it and a
constructive trade when it does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from fractions import Fraction

from .instruments import (
    ExerciseStyle,
    Forward,
    Loan,
    Option,
    OptionKind,
    Party,
    Portfolio,
    Position,
    SettlementMode,
    Side,
    Stock,
    Swap,
    describe,
    loan_maturity_value,
    position,
    underlying_issuer,
    validate_contract,
)
from .money import ExactnessError, Money, Rate, mul_exact


class ProfileError(ValueError):
    """A payoff profile cannot be built for the given portfolio."""


@dataclass(frozen=True, slots=True)
class ConditionCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True, slots=True)
class ConditionReport:
    """The six equalities that make the loan-plus-options bundle
    replicate the share exactly."""

    checks: tuple[ConditionCheck, ...]

    @property
    def all_pass(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> tuple[str, ...]:
        return tuple(check.name for check in self.checks if not check.passed)

    def __getitem__(self, name: str) -> ConditionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def check_parity_conditions(
    call: Option,
    put: Option,
    loan: Loan,
    *,
    issuer: str,
    initial_price: Money,
    quantity: int,
) -> ConditionReport:
    """Evaluate the six parity conditions; failures are reported with
    the offending values, never raised."""
    validate_contract(call)
    validate_contract(put)
    validate_contract(loan)
    checks: list[ConditionCheck] = []

    strikes_equal = call.strike_per_share == put.strike_per_share
    checks.append(
        ConditionCheck(
            "strikes_equal",
            strikes_equal,
            "" if strikes_equal else f"call strike {call.strike_per_share} != put strike {put.strike_per_share}",
        )
    )

    try:
        at_maturity = loan_maturity_value(loan)
        strike_total = call.strike_per_share * call.quantity
        ok = strike_total == at_maturity
        detail = "" if ok else f"strike total {strike_total} != principal plus interest {at_maturity}"
    except (ExactnessError, ValueError) as exc:
        ok, detail = False, str(exc)
    checks.append(ConditionCheck("strike_equals_loan_at_maturity", ok, detail))

    try:
        initial_total = initial_price * quantity
        ok = loan.principal == initial_total
        detail = "" if ok else f"principal {loan.principal} != initial share value {initial_total}"
    except ValueError as exc:
        ok, detail = False, str(exc)
    checks.append(ConditionCheck("principal_equals_initial_value", ok, detail))

    same_underlying = (
        call.issuer == put.issuer == issuer and call.quantity == put.quantity == quantity
    )
    checks.append(
        ConditionCheck(
            "same_underlying",
            same_underlying,
            ""
            if same_underlying
            else f"call {call.quantity:,} {call.issuer} vs put {put.quantity:,} {put.issuer} vs reference {quantity:,} {issuer}",
        )
    )

    both_european = call.style is ExerciseStyle.EUROPEAN and put.style is ExerciseStyle.EUROPEAN
    checks.append(
        ConditionCheck(
            "both_european",
            both_european,
            "" if both_european else f"styles are {call.style.value}/{put.style.value}",
        )
    )

    dates_aligned = call.exercise_date == put.exercise_date == loan.maturity
    checks.append(
        ConditionCheck(
            "exercise_dates_match_maturity",
            dates_aligned,
            ""
            if dates_aligned
            else f"call {call.exercise_date}, put {put.exercise_date}, loan {loan.maturity}",
        )
    )
    return ConditionReport(tuple(checks))


@dataclass(frozen=True, slots=True)
class PayoffProfile:
    """Exact piecewise-linear payoff as a function of per-share price.

    ``breakpoints`` are strictly increasing per-share prices in minor
    units; ``slopes`` has one more element than ``breakpoints`` and
    gives minor units of payoff per minor unit of per-share price
    (i.e. a signed share count) on each segment; ``intercept`` is the
    payoff at price zero.
    """

    currency: str
    intercept: Money
    breakpoints: tuple[int, ...]
    slopes: tuple[Fraction, ...]
    issuer: str | None = None

    def __post_init__(self) -> None:
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise ProfileError("need exactly one slope per segment")
        if any(b >= a for a, b in zip(self.breakpoints[1:], self.breakpoints)):
            raise ProfileError("breakpoints must be strictly increasing")
        if self.intercept.currency != self.currency:
            raise ProfileError("intercept currency must match profile currency")

    def value_at(self, price: Money) -> Money:
        """Exact payoff at a terminal per-share price."""
        if price.currency != self.currency:
            raise ProfileError(f"profile is in {self.currency}, price in {price.currency}")
        if price.minor_units < 0:
            raise ProfileError(f"price must be nonnegative, got {price}")
        p = price.minor_units
        total = Fraction(self.intercept.minor_units)
        lower = 0
        for breakpoint_, slope in zip(self.breakpoints, self.slopes):
            if p <= breakpoint_:
                total += slope * (p - lower)
                break
            total += slope * (breakpoint_ - lower)
            lower = breakpoint_
        else:
            total += self.slopes[-1] * (p - lower)
        if total.denominator != 1:
            raise ExactnessError(f"profile value at {price} is not a whole number of minor units")
        return Money(int(total), self.currency)

    def canonical(self) -> "PayoffProfile":
        """Drop breakpoints where the slope does not actually change."""
        breakpoints: list[int] = []
        slopes: list[Fraction] = [self.slopes[0]]
        for breakpoint_, slope in zip(self.breakpoints, self.slopes[1:]):
            if slope == slopes[-1]:
                continue
            breakpoints.append(breakpoint_)
            slopes.append(slope)
        return PayoffProfile(
            self.currency, self.intercept, tuple(breakpoints), tuple(slopes), self.issuer
        )

    @property
    def uniform_slope(self) -> Fraction | None:
        """The single slope if the profile has no kink, else None."""
        canon = self.canonical()
        return canon.slopes[0] if not canon.breakpoints else None


def _flat(currency: str, intercept: Money, issuer: str | None = None) -> PayoffProfile:
    return PayoffProfile(currency, intercept, (), (Fraction(0),), issuer)


def _linear(
    currency: str, intercept: Money, slope: int, issuer: str
) -> PayoffProfile:
    return PayoffProfile(currency, intercept, (), (Fraction(slope),), issuer)


def _kinked(
    currency: str,
    intercept: Money,
    breakpoint_: int,
    below: int,
    above: int,
    issuer: str,
) -> PayoffProfile:
    if below == above:
        return PayoffProfile(currency, intercept, (), (Fraction(below),), issuer)
    return PayoffProfile(
        currency, intercept, (breakpoint_,), (Fraction(below), Fraction(above)), issuer
    )


def _negate(profile: PayoffProfile) -> PayoffProfile:
    return PayoffProfile(
        profile.currency,
        -profile.intercept,
        profile.breakpoints,
        tuple(-s for s in profile.slopes),
        profile.issuer,
    )


def _add(a: PayoffProfile, b: PayoffProfile) -> PayoffProfile:
    if a.currency != b.currency:
        raise ProfileError(f"cannot add a {a.currency} profile to a {b.currency} profile")
    if a.issuer is not None and b.issuer is not None and a.issuer != b.issuer:
        raise ProfileError(
            f"profiles track different underlyings ({a.issuer} vs {b.issuer})"
        )
    merged = tuple(sorted(set(a.breakpoints) | set(b.breakpoints)))

    def slope_at(profile: PayoffProfile, lower: int) -> Fraction:
        index = 0
        for breakpoint_ in profile.breakpoints:
            if breakpoint_ <= lower:
                index += 1
        return profile.slopes[index]

    lowers = (0,) + merged
    slopes = tuple(slope_at(a, lo) + slope_at(b, lo) for lo in lowers)
    return PayoffProfile(
        a.currency,
        a.intercept + b.intercept,
        merged,
        slopes,
        a.issuer if a.issuer is not None else b.issuer,
    ).canonical()


def _instrument_profile(instrument, currency: str) -> PayoffProfile:
    """Long-side profile of a single instrument."""
    if isinstance(instrument, Stock):
        return _linear(currency, Money(0, currency), instrument.quantity, instrument.issuer)
    if isinstance(instrument, Loan):
        return _flat(currency, loan_maturity_value(instrument))
    if isinstance(instrument, Option):
        if instrument.settlement is not SettlementMode.CASH_NET:
            raise ProfileError(f"{describe(instrument)} settles physically; profile undefined")
        if instrument.style is not ExerciseStyle.EUROPEAN:
            raise ProfileError(f"{describe(instrument)} is not european; profile undefined")
        strike = instrument.strike_per_share.minor_units
        qty = instrument.quantity
        if instrument.kind is OptionKind.CALL:
            if strike == 0:
                return _linear(currency, Money(0, currency), qty, instrument.issuer)
            return _kinked(currency, Money(0, currency), strike, 0, qty, instrument.issuer)
        # put: worth strike x qty at price zero, declining to the strike
        if strike == 0:
            return _flat(currency, Money(0, currency), instrument.issuer)
        return _kinked(
            currency,
            Money(strike * qty, currency),
            strike,
            -qty,
            0,
            instrument.issuer,
        )
    if isinstance(instrument, Forward):
        if instrument.settlement is not SettlementMode.CASH_NET:
            raise ProfileError(f"{describe(instrument)} settles physically; profile undefined")
        intercept = -(instrument.delivery_price_per_share * instrument.quantity)
        return _linear(currency, intercept, instrument.quantity, instrument.issuer)
    if isinstance(instrument, Swap):
        fixed_leg = mul_exact(instrument.fixed_rate, instrument.notional)
        intercept = -(instrument.reference_price_per_share * instrument.quantity) - fixed_leg
        return _linear(currency, intercept, instrument.quantity, instrument.issuer)
    raise ProfileError(f"unsupported instrument {type(instrument).__name__}")


def payoff_profile(portfolio: Portfolio, currency: str | None = None) -> PayoffProfile:
    """Exact profile of a whole portfolio; breakpoints are the option
    strikes and forward delivery prices present."""
    if currency is None:
        currency = _portfolio_currency(portfolio)
    total = _flat(currency, Money(0, currency))
    for pos in portfolio.positions:
        validate_contract(pos.instrument)
        piece = _instrument_profile(pos.instrument, currency)
        if pos.side is Side.SHORT:
            piece = _negate(piece)
        total = _add(total, piece)
    return total


def _portfolio_currency(portfolio: Portfolio) -> str:
    for pos in portfolio.positions:
        instrument = pos.instrument
        if isinstance(instrument, Loan):
            return instrument.principal.currency
        if isinstance(instrument, Option):
            return instrument.strike_per_share.currency
        if isinstance(instrument, Forward):
            return instrument.delivery_price_per_share.currency
        if isinstance(instrument, Swap):
            return instrument.notional.currency
    from .money import DEFAULT_CURRENCY

    return DEFAULT_CURRENCY


@dataclass(frozen=True, slots=True)
class EquivalenceResult:
    equivalent: bool
    witness: Money | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def economic_equivalence(a: Portfolio, b: Portfolio) -> EquivalenceResult:
    """Exact function equality of the two payoff profiles.

    Divergent results carry a concrete witness price at which the
    payoffs differ. Profiles are compared as functions of the terminal
    per-share price.
    """
    profile_a = payoff_profile(a).canonical()
    profile_b = payoff_profile(b, profile_a.currency).canonical()
    if (
        profile_a.intercept == profile_b.intercept
        and profile_a.breakpoints == profile_b.breakpoints
        and profile_a.slopes == profile_b.slopes
    ):
        return EquivalenceResult(True)
    # distinct canonical forms must disagree at a kink of one of them, at
    # zero, or one step beyond the last kink (both are linear out there)
    candidates = sorted(set(profile_a.breakpoints) | set(profile_b.breakpoints) | {0})
    candidates.append(candidates[-1] + 1)
    for price_units in candidates:
        price = Money(price_units, profile_a.currency)
        if profile_a.value_at(price) != profile_b.value_at(price):
            return EquivalenceResult(False, price)
    raise AssertionError("canonical profiles differ but no witness price found")


@dataclass(frozen=True, slots=True)
class TitleAudit:
    moves_title: bool
    movers: tuple[str, ...]


def title_transfer_audit(portfolio: Portfolio) -> TitleAudit:
    """Flag every position whose settlement moves share title: stock
    itself and physically settled options/forwards. Cash-netting
    derivatives, swaps and loans move nothing."""
    movers: list[str] = []
    for pos in portfolio.positions:
        instrument = pos.instrument
        if isinstance(instrument, Stock):
            movers.append(describe(instrument))
        elif isinstance(instrument, (Option, Forward)):
            if instrument.settlement is SettlementMode.PHYSICAL:
                movers.append(describe(instrument))
    return TitleAudit(bool(movers), tuple(movers))


class VerdictKind(Enum):
    ACTUAL_TRADE = "actual_trade"
    CONSTRUCTIVE_TRADE = "constructive_trade"
    NO_EXPOSURE = "no_exposure"


@dataclass(frozen=True, slots=True)
class DetectionVerdict:
    kind: VerdictKind
    issuer: str
    quantity: int
    direction: Side | None
    profile: PayoffProfile
    exact_match: bool

    def describe(self) -> str:
        if self.kind is VerdictKind.NO_EXPOSURE:
            suffix = "" if self.exact_match else " (nonlinear residual exposure)"
            return f"no exposure to {self.issuer}{suffix}"
        direction = self.direction.value if self.direction else "?"
        label = "actual trade" if self.kind is VerdictKind.ACTUAL_TRADE else "constructive trade"
        return f"{label}: {direction} {self.quantity:,} {self.issuer}"


def detect_constructive_trade(portfolio: Portfolio, reference_issuer: str) -> DetectionVerdict:
    """Classify a portfolio's exposure to a reference security.

    A constant (loan-like) component is tolerated: only the slope
    structure counts as equity exposure. A uniform slope of s shares
    means the payoff, net of the constant, is exactly that of holding s
    shares; it is an actual trade when any of the matching instruments
    moves title and a constructive trade otherwise. A zero slope means
    no exposure; a remaining kink means the exposure does not replicate
    a fixed share count and is reported as no-exposure with evidence.
    """
    relevant = tuple(
        pos
        for pos in portfolio.positions
        if isinstance(pos.instrument, Loan) or underlying_issuer(pos.instrument) == reference_issuer
    )
    sub = Portfolio(portfolio.owner, relevant)
    profile = payoff_profile(sub).canonical()
    slope = profile.uniform_slope
    if slope is None:
        return DetectionVerdict(
            VerdictKind.NO_EXPOSURE, reference_issuer, 0, None, profile, False
        )
    if slope == 0:
        return DetectionVerdict(
            VerdictKind.NO_EXPOSURE, reference_issuer, 0, None, profile, True
        )
    if slope.denominator != 1:
        return DetectionVerdict(
            VerdictKind.NO_EXPOSURE, reference_issuer, 0, None, profile, False
        )
    quantity = abs(int(slope))
    direction = Side.LONG if slope > 0 else Side.SHORT
    audit = title_transfer_audit(sub)
    kind = VerdictKind.ACTUAL_TRADE if audit.moves_title else VerdictKind.CONSTRUCTIVE_TRADE
    return DetectionVerdict(kind, reference_issuer, quantity, direction, profile, True)


def synthesize_long_stock(
    issuer: str,
    quantity: int,
    initial_price: Money,
    rate: Rate,
    trade_date: date,
    settlement_date: date,
    investor: Party,
    dealer: Party,
) -> Portfolio:
    """The three-contract bundle replicating a long share position:
    lend the purchase price, hold the call, write the put, all struck at
    principal plus interest. Passes every parity condition."""
    if quantity <= 0:
        raise ProfileError(f"quantity must be positive, got {quantity}")
    principal = initial_price * quantity
    interest = mul_exact(rate, principal)
    strike_total = principal + interest
    if strike_total.minor_units % quantity != 0:
        raise ExactnessError(
            f"strike total {strike_total} does not divide evenly over {quantity:,} shares"
        )
    strike_per_share = Money(strike_total.minor_units // quantity, strike_total.currency)
    loan = Loan(
        lender=investor,
        borrower=dealer,
        principal=principal,
        rate=rate,
        trade_date=trade_date,
        maturity=settlement_date,
    )
    call = Option(
        kind=OptionKind.CALL,
        style=ExerciseStyle.EUROPEAN,
        holder=investor,
        writer=dealer,
        issuer=issuer,
        quantity=quantity,
        strike_per_share=strike_per_share,
        trade_date=trade_date,
        exercise_date=settlement_date,
        settlement=SettlementMode.CASH_NET,
    )
    put = Option(
        kind=OptionKind.PUT,
        style=ExerciseStyle.EUROPEAN,
        holder=dealer,
        writer=investor,
        issuer=issuer,
        quantity=quantity,
        strike_per_share=strike_per_share,
        trade_date=trade_date,
        exercise_date=settlement_date,
        settlement=SettlementMode.CASH_NET,
    )
    for instrument in (loan, call, put):
        validate_contract(instrument)
    return Portfolio(
        investor,
        (
            position(investor, loan),
            position(investor, call),
            position(investor, put),
        ),
    )


def synthesize_loan(
    issuer: str,
    quantity: int,
    initial_price: Money,
    rate: Rate,
    trade_date: date,
    settlement_date: date,
    stockholder: Party,
    counterparty: Party,
) -> Portfolio:
    """The mirror bundle replicating a riskless loan: hold the shares,
    hold the put, write the call. Its payoff is the constant principal
    plus interest for every terminal price."""
    synthetic = synthesize_long_stock(
        issuer,
        quantity,
        initial_price,
        rate,
        trade_date,
        settlement_date,
        investor=counterparty,
        dealer=stockholder,
    )
    _, call_pos, put_pos = synthetic.positions
    stock = Stock(issuer=issuer, quantity=quantity)
    validate_contract(stock)
    return Portfolio(
        stockholder,
        (
            position(stockholder, stock, Side.LONG),
            position(stockholder, put_pos.instrument),
            position(stockholder, call_pos.instrument),
        ),
    )
