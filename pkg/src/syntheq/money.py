"""Exact money and rate arithmetic.

Amounts are signed integer counts of the smallest currency unit
(centavos for pesos); rates are stdlib ``Fraction`` values held in
lowest terms. Every operation either returns an exact result or raises;
nothing is ever silently rounded or converted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_CURRENCY = "PHP"

# Minor units per major unit (centavos per peso). All supported
# currencies are two-decimal.
MINOR_PER_MAJOR = 100
_DECIMALS = 2


class CurrencyMismatchError(ValueError):
    """Amounts in different currencies were combined."""


class ExactnessError(ArithmeticError):
    """An operation could not be carried out exactly."""


Rate = Fraction


def make_rate(numerator: int, denominator: int) -> Rate:
    """Rate in lowest terms; the sign is carried by the numerator."""
    if denominator == 0:
        raise ZeroDivisionError("rate denominator must be nonzero")
    return Fraction(numerator, denominator)


@dataclass(frozen=True, slots=True)
class Money:
    """A signed, exact amount of a single currency in minor units."""

    minor_units: int
    currency: str = DEFAULT_CURRENCY

    def __post_init__(self) -> None:
        if isinstance(self.minor_units, bool) or not isinstance(self.minor_units, int):
            raise TypeError(
                f"minor_units must be int, got {type(self.minor_units).__name__}"
            )
        if not self.currency:
            raise ValueError("currency code must be nonempty")

    def _require_same(self, other: "Money") -> None:
        if self.currency != other.currency:
            raise CurrencyMismatchError(
                f"cannot mix {self.currency} with {other.currency}"
            )

    def __add__(self, other: "Money") -> "Money":
        self._require_same(other)
        return Money(self.minor_units + other.minor_units, self.currency)

    def __sub__(self, other: "Money") -> "Money":
        self._require_same(other)
        return Money(self.minor_units - other.minor_units, self.currency)

    def __neg__(self) -> "Money":
        return Money(-self.minor_units, self.currency)

    def __mul__(self, count: int) -> "Money":
        if isinstance(count, bool) or not isinstance(count, int):
            raise TypeError(f"Money can only be scaled by int, got {type(count).__name__}")
        return Money(self.minor_units * count, self.currency)

    __rmul__ = __mul__

    def __lt__(self, other: "Money") -> bool:
        self._require_same(other)
        return self.minor_units < other.minor_units

    def __le__(self, other: "Money") -> bool:
        self._require_same(other)
        return self.minor_units <= other.minor_units

    def __gt__(self, other: "Money") -> bool:
        self._require_same(other)
        return self.minor_units > other.minor_units

    def __ge__(self, other: "Money") -> bool:
        self._require_same(other)
        return self.minor_units >= other.minor_units

    @property
    def is_zero(self) -> bool:
        return self.minor_units == 0

    @property
    def is_negative(self) -> bool:
        return self.minor_units < 0

    def __str__(self) -> str:
        return f"{self.currency} {format_money(self)}"


def zero(currency: str = DEFAULT_CURRENCY) -> Money:
    return Money(0, currency)


def mul_exact(rate: Rate, amount: Money) -> Money:
    """Exact ``rate * amount``; raises ExactnessError when indivisible.

    5% of 100,000,000.00 pesos is exactly 5,000,000.00; a third of ten
    centavos is not a whole number of centavos and errors instead of
    rounding.
    """
    scaled = rate * amount.minor_units
    if scaled.denominator != 1:
        raise ExactnessError(
            f"{rate} of {amount} is not a whole number of minor units"
        )
    return Money(int(scaled), amount.currency)


_MONEY_RE = re.compile(r"([+-]?)([0-9][0-9,]*)(?:\.([0-9]+))?")


def parse_money(text: str, currency: str = DEFAULT_CURRENCY) -> Money:
    """Parse a decimal string ("150,000,000.00", "105.5") to exact minor units.

    At most two decimal places are accepted; anything finer cannot be an
    exact count of minor units and raises ExactnessError.
    """
    match = _MONEY_RE.fullmatch(text.strip())
    if match is None:
        raise ValueError(f"not a money amount: {text!r}")
    sign_s, whole_s, frac_s = match.groups()
    whole = whole_s.replace(",", "")
    if not whole.isdigit():
        raise ValueError(f"not a money amount: {text!r}")
    frac = frac_s or ""
    if len(frac) > _DECIMALS:
        raise ExactnessError(
            f"{text!r} has more than {_DECIMALS} decimal places; "
            "amounts must be exact in minor units"
        )
    frac = frac.ljust(_DECIMALS, "0")
    units = int(whole) * MINOR_PER_MAJOR + int(frac)
    if sign_s == "-":
        units = -units
    return Money(units, currency)


def format_money(amount: Money) -> str:
    """Render with thousands separators and two decimals: 150,000,000.00."""
    sign = "-" if amount.minor_units < 0 else ""
    major, minor = divmod(abs(amount.minor_units), MINOR_PER_MAJOR)
    return f"{sign}{major:,}.{minor:02d}"


def parse_rate(text: str) -> Rate:
    """Parse "1/20", "5%" or an exact decimal string like "0.05"."""
    text = text.strip()
    if "/" in text:
        num_s, den_s = text.split("/", 1)
        return make_rate(int(num_s), int(den_s))
    if text.endswith("%"):
        body = text[:-1].strip()
        return parse_rate(body) / 100
    if "." in text:
        whole_s, frac_s = text.split(".", 1)
        sign = -1 if whole_s.startswith("-") else 1
        whole_s = whole_s.lstrip("+-") or "0"
        if not (whole_s.isdigit() and frac_s.isdigit()):
            raise ValueError(f"not a rate: {text!r}")
        scale = 10 ** len(frac_s)
        return make_rate(sign * (int(whole_s) * scale + int(frac_s)), scale)
    return make_rate(int(text), 1)


def format_rate(rate: Rate) -> str:
    return f"{rate.numerator}/{rate.denominator}"
