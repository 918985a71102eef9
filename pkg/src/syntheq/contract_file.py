"""Contract file format: a versioned JSON document describing parties,
instruments, portfolios, price scenarios and detection requests.

Amounts are decimal strings parsed exactly to minor units; rates are
"numerator/denominator", "x%" or exact decimal strings. Unknown fields
are rejected by name. ``parse_contracts`` -> ``render_contracts`` ->
``parse_contracts`` round-trips to an identical model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date

from .instruments import (
    ExerciseStyle,
    Forward,
    InsiderRelations,
    InsiderRole,
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
    classify_insider,
    position,
    validate_contract,
)
from .money import (
    DEFAULT_CURRENCY,
    ExactnessError,
    Money,
    format_rate,
    parse_money,
    parse_rate,
)
from .payoff import PriceScenario

SCHEMA_VERSION = 1


class ContractFileError(ValueError):
    """A contract document failed to parse or validate; the message is
    addressed by field path."""


@dataclass(frozen=True)
class DetectionRequest:
    portfolio: str
    reference_issuer: str


@dataclass(frozen=True)
class ConstructionRef:
    loan: str
    call: str
    put: str
    counterparty_shares: int | None = None


@dataclass(frozen=True)
class ContractModel:
    currency: str
    parties: dict[str, Party]
    relations: InsiderRelations | None
    instruments: dict[str, Instrument]
    instrument_order: tuple[str, ...]
    portfolios: dict[str, Portfolio]
    portfolio_order: tuple[str, ...]
    scenarios: dict[str, PriceScenario]
    scenario_order: tuple[str, ...]
    detections: tuple[DetectionRequest, ...] = ()
    construction: ConstructionRef | None = None
    explicit_roles: frozenset[str] = field(default_factory=frozenset)
    explicit_sides: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def construction_instruments(self) -> tuple[Loan, Option, Option]:
        """The loan/call/put triple, explicit or inferred by uniqueness."""
        if self.construction is not None:
            loan = self.instruments[self.construction.loan]
            call = self.instruments[self.construction.call]
            put = self.instruments[self.construction.put]
        else:
            loans = [i for i in self.instruments.values() if isinstance(i, Loan)]
            calls = [
                i
                for i in self.instruments.values()
                if isinstance(i, Option) and i.kind is OptionKind.CALL
            ]
            puts = [
                i
                for i in self.instruments.values()
                if isinstance(i, Option) and i.kind is OptionKind.PUT
            ]
            if len(loans) != 1 or len(calls) != 1 or len(puts) != 1:
                raise ContractFileError(
                    "construction: cannot infer the loan/call/put triple; "
                    "add a 'construction' block naming them"
                )
            loan, call, put = loans[0], calls[0], puts[0]
        if not isinstance(loan, Loan):
            raise ContractFileError("construction.loan: not a loan")
        if not isinstance(call, Option) or call.kind is not OptionKind.CALL:
            raise ContractFileError("construction.call: not a call option")
        if not isinstance(put, Option) or put.kind is not OptionKind.PUT:
            raise ContractFileError("construction.put: not a put option")
        return loan, call, put


def _require_keys(obj, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ContractFileError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ContractFileError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    missing = required - set(obj)
    if missing:
        raise ContractFileError(f"{where}: missing field {sorted(missing)[0]!r}")


def _parse_date(value, where: str) -> date:
    if not isinstance(value, str):
        raise ContractFileError(f"{where}: expected an ISO date string")
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise ContractFileError(f"{where}: {exc}") from exc


def _parse_amount(value, currency: str, where: str) -> Money:
    if not isinstance(value, str):
        raise ContractFileError(
            f"{where}: amounts must be decimal strings, got {type(value).__name__}"
        )
    try:
        return parse_money(value, currency)
    except (ExactnessError, ValueError) as exc:
        raise ContractFileError(f"{where}: {exc}") from exc


def _parse_quantity(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ContractFileError(f"{where}: expected an integer share count")
    return value


def _parse_enum(value, enum_cls, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(member.value for member in enum_cls)
        raise ContractFileError(f"{where}: expected one of {options}, got {value!r}") from None


def _party(parties: dict[str, Party], party_id, where: str) -> Party:
    if party_id not in parties:
        raise ContractFileError(f"{where}: unknown party {party_id!r}")
    return parties[party_id]


def _parse_instrument(
    entry: dict, parties: dict[str, Party], currency: str, where: str
) -> Instrument:
    if not isinstance(entry, dict):
        raise ContractFileError(f"{where}: expected an object")
    kind = entry.get("type")
    common = {"id", "type"}
    if kind == "stock":
        _require_keys(entry, common | {"issuer", "quantity"}, common | {"issuer", "quantity"}, where)
        return Stock(issuer=entry["issuer"], quantity=_parse_quantity(entry["quantity"], f"{where}.quantity"))
    if kind == "loan":
        keys = common | {"lender", "borrower", "principal", "rate", "trade_date", "maturity"}
        _require_keys(entry, keys, keys, where)
        try:
            rate = parse_rate(entry["rate"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ContractFileError(f"{where}.rate: {exc}") from exc
        return Loan(
            lender=_party(parties, entry["lender"], f"{where}.lender"),
            borrower=_party(parties, entry["borrower"], f"{where}.borrower"),
            principal=_parse_amount(entry["principal"], currency, f"{where}.principal"),
            rate=rate,
            trade_date=_parse_date(entry["trade_date"], f"{where}.trade_date"),
            maturity=_parse_date(entry["maturity"], f"{where}.maturity"),
        )
    if kind == "option":
        required = common | {
            "kind",
            "style",
            "holder",
            "writer",
            "issuer",
            "quantity",
            "strike_per_share",
            "trade_date",
            "exercise_date",
            "settlement",
        }
        _require_keys(entry, required | {"premium"}, required, where)
        premium = (
            _parse_amount(entry["premium"], currency, f"{where}.premium")
            if "premium" in entry
            else Money(0, currency)
        )
        return Option(
            kind=_parse_enum(entry["kind"], OptionKind, f"{where}.kind"),
            style=_parse_enum(entry["style"], ExerciseStyle, f"{where}.style"),
            holder=_party(parties, entry["holder"], f"{where}.holder"),
            writer=_party(parties, entry["writer"], f"{where}.writer"),
            issuer=entry["issuer"],
            quantity=_parse_quantity(entry["quantity"], f"{where}.quantity"),
            strike_per_share=_parse_amount(entry["strike_per_share"], currency, f"{where}.strike_per_share"),
            trade_date=_parse_date(entry["trade_date"], f"{where}.trade_date"),
            exercise_date=_parse_date(entry["exercise_date"], f"{where}.exercise_date"),
            settlement=_parse_enum(entry["settlement"], SettlementMode, f"{where}.settlement"),
            premium=premium,
        )
    if kind == "forward":
        keys = common | {
            "buyer",
            "seller",
            "issuer",
            "quantity",
            "delivery_price_per_share",
            "trade_date",
            "delivery_date",
            "settlement",
        }
        _require_keys(entry, keys, keys, where)
        return Forward(
            buyer=_party(parties, entry["buyer"], f"{where}.buyer"),
            seller=_party(parties, entry["seller"], f"{where}.seller"),
            issuer=entry["issuer"],
            quantity=_parse_quantity(entry["quantity"], f"{where}.quantity"),
            delivery_price_per_share=_parse_amount(
                entry["delivery_price_per_share"], currency, f"{where}.delivery_price_per_share"
            ),
            trade_date=_parse_date(entry["trade_date"], f"{where}.trade_date"),
            delivery_date=_parse_date(entry["delivery_date"], f"{where}.delivery_date"),
            settlement=_parse_enum(entry["settlement"], SettlementMode, f"{where}.settlement"),
        )
    if kind == "swap":
        keys = common | {
            "equity_receiver",
            "fixed_receiver",
            "issuer",
            "quantity",
            "reference_price_per_share",
            "notional",
            "fixed_rate",
            "trade_date",
            "termination_date",
        }
        _require_keys(entry, keys, keys, where)
        try:
            fixed_rate = parse_rate(entry["fixed_rate"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ContractFileError(f"{where}.fixed_rate: {exc}") from exc
        return Swap(
            equity_receiver=_party(parties, entry["equity_receiver"], f"{where}.equity_receiver"),
            fixed_receiver=_party(parties, entry["fixed_receiver"], f"{where}.fixed_receiver"),
            issuer=entry["issuer"],
            quantity=_parse_quantity(entry["quantity"], f"{where}.quantity"),
            reference_price_per_share=_parse_amount(
                entry["reference_price_per_share"], currency, f"{where}.reference_price_per_share"
            ),
            notional=_parse_amount(entry["notional"], currency, f"{where}.notional"),
            fixed_rate=fixed_rate,
            trade_date=_parse_date(entry["trade_date"], f"{where}.trade_date"),
            termination_date=_parse_date(entry["termination_date"], f"{where}.termination_date"),
        )
    raise ContractFileError(f"{where}.type: unknown instrument type {kind!r}")


def parse_contracts(text: str) -> ContractModel:
    """Parse and fully validate a contract document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ContractFileError("document: expected a JSON object")
    _require_keys(
        doc,
        {
            "schema_version",
            "currency",
            "parties",
            "insider_relations",
            "instruments",
            "portfolios",
            "scenarios",
            "detections",
            "construction",
        },
        {"schema_version", "parties", "instruments"},
        "document",
    )
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ContractFileError(
            f"schema_version: expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"
        )
    currency = doc.get("currency", DEFAULT_CURRENCY)
    if not isinstance(currency, str) or not currency:
        raise ContractFileError("currency: expected a nonempty code string")

    relations: InsiderRelations | None = None
    if "insider_relations" in doc:
        rel = doc["insider_relations"]
        _require_keys(
            rel,
            {"issuer", "position_holders", "tips"},
            {"issuer", "position_holders"},
            "insider_relations",
        )
        tips = tuple(
            (tip[0], tip[1])
            for tip in rel.get("tips", ())
            if isinstance(tip, list) and len(tip) == 2
        )
        if len(tips) != len(rel.get("tips", ())):
            raise ContractFileError("insider_relations.tips: each tip is a [tipper, tippee] pair")
        relations = InsiderRelations(
            issuer=rel["issuer"],
            position_holders=frozenset(rel["position_holders"]),
            tips=tips,
        )

    parties: dict[str, Party] = {}
    explicit_roles: set[str] = set()
    for index, entry in enumerate(doc["parties"]):
        where = f"parties[{index}]"
        _require_keys(entry, {"id", "role"}, {"id"}, where)
        party_id = entry["id"]
        if party_id in parties:
            raise ContractFileError(f"{where}: duplicate party id {party_id!r}")
        if "role" in entry:
            role = _parse_enum(entry["role"], InsiderRole, f"{where}.role")
            explicit_roles.add(party_id)
        elif relations is not None:
            role = classify_insider(Party(party_id), relations)
        else:
            role = InsiderRole.NOT_INSIDER
        parties[party_id] = Party(party_id, role)

    instruments: dict[str, Instrument] = {}
    order: list[str] = []
    for index, entry in enumerate(doc["instruments"]):
        where = f"instruments[{index}]"
        if not isinstance(entry, dict) or "id" not in entry:
            raise ContractFileError(f"{where}: missing field 'id'")
        instrument_id = entry["id"]
        if instrument_id in instruments:
            raise ContractFileError(f"{where}: duplicate instrument id {instrument_id!r}")
        instrument = _parse_instrument(entry, parties, currency, where)
        try:
            validate_contract(instrument)
        except ValueError as exc:
            raise ContractFileError(f"{where}: {exc}") from exc
        instruments[instrument_id] = instrument
        order.append(instrument_id)

    portfolios: dict[str, Portfolio] = {}
    portfolio_order: list[str] = []
    explicit_sides: set[tuple[str, str]] = set()
    for index, entry in enumerate(doc.get("portfolios", ())):
        where = f"portfolios[{index}]"
        _require_keys(entry, {"owner", "positions"}, {"owner", "positions"}, where)
        owner = _party(parties, entry["owner"], f"{where}.owner")
        if owner.id in portfolios:
            raise ContractFileError(f"{where}: duplicate portfolio for {owner.id!r}")
        built = []
        for pos_index, pos_entry in enumerate(entry["positions"]):
            pos_where = f"{where}.positions[{pos_index}]"
            _require_keys(pos_entry, {"instrument", "side"}, {"instrument"}, pos_where)
            ref = pos_entry["instrument"]
            if ref not in instruments:
                raise ContractFileError(f"{pos_where}: unknown instrument {ref!r}")
            side = None
            if "side" in pos_entry:
                side = _parse_enum(pos_entry["side"], Side, f"{pos_where}.side")
                explicit_sides.add((owner.id, ref))
            try:
                built.append(position(owner, instruments[ref], side))
            except ValueError as exc:
                raise ContractFileError(f"{pos_where}: {exc}") from exc
        portfolios[owner.id] = Portfolio(owner, tuple(built))
        portfolio_order.append(owner.id)

    scenarios: dict[str, PriceScenario] = {}
    scenario_order: list[str] = []
    for index, entry in enumerate(doc.get("scenarios", ())):
        where = f"scenarios[{index}]"
        keys = {"id", "issuer", "terminal_date", "initial_price_per_share", "terminal_price_per_share"}
        _require_keys(entry, keys, keys, where)
        scenario_id = entry["id"]
        if scenario_id in scenarios:
            raise ContractFileError(f"{where}: duplicate scenario id {scenario_id!r}")
        try:
            scenarios[scenario_id] = PriceScenario(
                issuer=entry["issuer"],
                terminal_date=_parse_date(entry["terminal_date"], f"{where}.terminal_date"),
                terminal_price_per_share=_parse_amount(
                    entry["terminal_price_per_share"], currency, f"{where}.terminal_price_per_share"
                ),
                initial_price_per_share=_parse_amount(
                    entry["initial_price_per_share"], currency, f"{where}.initial_price_per_share"
                ),
            )
        except ValueError as exc:
            raise ContractFileError(f"{where}: {exc}") from exc
        scenario_order.append(scenario_id)

    detections = []
    for index, entry in enumerate(doc.get("detections", ())):
        where = f"detections[{index}]"
        keys = {"portfolio", "reference_issuer"}
        _require_keys(entry, keys, keys, where)
        if entry["portfolio"] not in portfolios:
            raise ContractFileError(f"{where}.portfolio: unknown portfolio {entry['portfolio']!r}")
        detections.append(DetectionRequest(entry["portfolio"], entry["reference_issuer"]))

    construction = None
    if "construction" in doc:
        entry = doc["construction"]
        _require_keys(
            entry,
            {"loan", "call", "put", "counterparty_shares"},
            {"loan", "call", "put"},
            "construction",
        )
        for key in ("loan", "call", "put"):
            if entry[key] not in instruments:
                raise ContractFileError(f"construction.{key}: unknown instrument {entry[key]!r}")
        shares = entry.get("counterparty_shares")
        if shares is not None:
            shares = _parse_quantity(shares, "construction.counterparty_shares")
        construction = ConstructionRef(entry["loan"], entry["call"], entry["put"], shares)

    return ContractModel(
        currency=currency,
        parties=parties,
        relations=relations,
        instruments=instruments,
        instrument_order=tuple(order),
        portfolios=portfolios,
        portfolio_order=tuple(portfolio_order),
        scenarios=scenarios,
        scenario_order=tuple(scenario_order),
        detections=tuple(detections),
        construction=construction,
        explicit_roles=frozenset(explicit_roles),
        explicit_sides=frozenset(explicit_sides),
    )


def load_contracts(path) -> ContractModel:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_contracts(handle.read())


def _amount_str(amount: Money) -> str:
    sign = "-" if amount.minor_units < 0 else ""
    major, minor = divmod(abs(amount.minor_units), 100)
    return f"{sign}{major}.{minor:02d}"


def _render_instrument(instrument_id: str, instrument: Instrument) -> dict:
    if isinstance(instrument, Stock):
        return {
            "id": instrument_id,
            "type": "stock",
            "issuer": instrument.issuer,
            "quantity": instrument.quantity,
        }
    if isinstance(instrument, Loan):
        return {
            "id": instrument_id,
            "type": "loan",
            "lender": instrument.lender.id,
            "borrower": instrument.borrower.id,
            "principal": _amount_str(instrument.principal),
            "rate": format_rate(instrument.rate),
            "trade_date": instrument.trade_date.isoformat(),
            "maturity": instrument.maturity.isoformat(),
        }
    if isinstance(instrument, Option):
        entry = {
            "id": instrument_id,
            "type": "option",
            "kind": instrument.kind.value,
            "style": instrument.style.value,
            "holder": instrument.holder.id,
            "writer": instrument.writer.id,
            "issuer": instrument.issuer,
            "quantity": instrument.quantity,
            "strike_per_share": _amount_str(instrument.strike_per_share),
            "trade_date": instrument.trade_date.isoformat(),
            "exercise_date": instrument.exercise_date.isoformat(),
            "settlement": instrument.settlement.value,
        }
        if instrument.premium.minor_units:
            entry["premium"] = _amount_str(instrument.premium)
        return entry
    if isinstance(instrument, Forward):
        return {
            "id": instrument_id,
            "type": "forward",
            "buyer": instrument.buyer.id,
            "seller": instrument.seller.id,
            "issuer": instrument.issuer,
            "quantity": instrument.quantity,
            "delivery_price_per_share": _amount_str(instrument.delivery_price_per_share),
            "trade_date": instrument.trade_date.isoformat(),
            "delivery_date": instrument.delivery_date.isoformat(),
            "settlement": instrument.settlement.value,
        }
    if isinstance(instrument, Swap):
        return {
            "id": instrument_id,
            "type": "swap",
            "equity_receiver": instrument.equity_receiver.id,
            "fixed_receiver": instrument.fixed_receiver.id,
            "issuer": instrument.issuer,
            "quantity": instrument.quantity,
            "reference_price_per_share": _amount_str(instrument.reference_price_per_share),
            "notional": _amount_str(instrument.notional),
            "fixed_rate": format_rate(instrument.fixed_rate),
            "trade_date": instrument.trade_date.isoformat(),
            "termination_date": instrument.termination_date.isoformat(),
        }
    raise ContractFileError(f"cannot render instrument type {type(instrument).__name__}")


def render_contracts(model: ContractModel) -> str:
    """Serialize a model back to the document format."""
    doc: dict = {"schema_version": SCHEMA_VERSION, "currency": model.currency}
    doc["parties"] = [
        {"id": party.id, "role": party.role.value}
        if party.id in model.explicit_roles
        else {"id": party.id}
        for party in model.parties.values()
    ]
    if model.relations is not None:
        doc["insider_relations"] = {
            "issuer": model.relations.issuer,
            "position_holders": sorted(model.relations.position_holders),
            "tips": [list(tip) for tip in model.relations.tips],
        }
    doc["instruments"] = [
        _render_instrument(instrument_id, model.instruments[instrument_id])
        for instrument_id in model.instrument_order
    ]
    if model.portfolios:

        def instrument_ref(instrument: Instrument) -> str:
            for instrument_id in model.instrument_order:
                if model.instruments[instrument_id] == instrument:
                    return instrument_id
            raise ContractFileError("portfolio references an instrument not in the model")

        doc["portfolios"] = []
        for owner_id in model.portfolio_order:
            portfolio = model.portfolios[owner_id]
            entries = []
            for pos in portfolio.positions:
                ref = instrument_ref(pos.instrument)
                entry: dict = {"instrument": ref}
                if (owner_id, ref) in model.explicit_sides:
                    entry["side"] = pos.side.value
                entries.append(entry)
            doc["portfolios"].append({"owner": owner_id, "positions": entries})
    if model.scenarios:
        doc["scenarios"] = [
            {
                "id": scenario_id,
                "issuer": model.scenarios[scenario_id].issuer,
                "terminal_date": model.scenarios[scenario_id].terminal_date.isoformat(),
                "initial_price_per_share": _amount_str(
                    model.scenarios[scenario_id].initial_price_per_share
                ),
                "terminal_price_per_share": _amount_str(
                    model.scenarios[scenario_id].terminal_price_per_share
                ),
            }
            for scenario_id in model.scenario_order
        ]
    if model.detections:
        doc["detections"] = [
            {"portfolio": det.portfolio, "reference_issuer": det.reference_issuer}
            for det in model.detections
        ]
    if model.construction is not None:
        entry = {
            "loan": model.construction.loan,
            "call": model.construction.call,
            "put": model.construction.put,
        }
        if model.construction.counterparty_shares is not None:
            entry["counterparty_shares"] = model.construction.counterparty_shares
        doc["construction"] = entry
    return json.dumps(doc, indent=2) + "\n"
