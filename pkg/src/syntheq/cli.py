"""Command line interface.

Subcommands: validate, payoff, settle, parity, detect, report. Exit
codes: 0 success, 1 validation error, 2 a constructive trade was
detected, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .contract_file import ContractFileError, ContractModel, load_contracts
from .instruments import ContractError, describe
from .money import ExactnessError, Money, format_money, parse_money
from .parity import VerdictKind, check_parity_conditions, detect_constructive_trade
from .payoff import PayoffError, PriceScenario, portfolio_payoff
from .report import (
    conditions_to_json,
    detection_to_json,
    render_condition_report,
    render_detection_report,
    render_payoff_table,
    render_scenario_header,
    render_settlement_report,
    render_trade_gain_table,
    settlement_to_json,
    jsonable_money,
)
from .settlement import SettlementError, settle

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONSTRUCTIVE = 2
EXIT_INTERNAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syntheq",
        description="Deterministic contract engine for synthetic-equity settlement and detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_scenario: bool = True) -> None:
        p.add_argument("file", help="contract file (JSON)")
        p.add_argument(
            "--format", choices=("text", "json"), default="text", help="output format"
        )
        if with_scenario:
            p.add_argument(
                "--scenario",
                help="scenario id from the file, or a terminal price like 150.00",
            )
            p.add_argument("--price", help="override the terminal per-share price")

    add_common(sub.add_parser("validate", help="parse and validate a contract file"), False)

    payoff_p = sub.add_parser("payoff", help="portfolio payoff tables at a scenario")
    add_common(payoff_p)
    payoff_p.add_argument("--portfolio", help="restrict to one portfolio owner")
    payoff_p.add_argument(
        "--grid",
        metavar="START:STOP:STEP",
        help="also tabulate total payoff over a per-share price grid",
    )

    add_common(sub.add_parser("settle", help="run the settlement pipeline"))
    add_common(sub.add_parser("parity", help="check the six parity conditions"), False)
    add_common(sub.add_parser("detect", help="classify portfolios against reference securities"), False)
    add_common(sub.add_parser("report", help="full report: settle all scenarios, parity, detect"))
    return parser


def _scenario_for(model: ContractModel, args) -> tuple[str, PriceScenario]:
    """Resolve --scenario/--price against the file's scenarios."""
    from dataclasses import replace

    names = list(model.scenario_order)
    if not names:
        raise ContractFileError("scenarios: the file defines none; add one")
    name = getattr(args, "scenario", None)
    price_text = getattr(args, "price", None)
    if name and name in model.scenarios:
        base_name, base = name, model.scenarios[name]
    elif name:
        # a bare price acts as an override of the first scenario
        price_text = price_text or name
        base_name, base = names[0], model.scenarios[names[0]]
    else:
        base_name, base = names[0], model.scenarios[names[0]]
    if price_text:
        price = parse_money(price_text, model.currency)
        return (
            f"{base_name}@{format_money(price)}",
            replace(base, terminal_price_per_share=price),
        )
    return base_name, base


def _cmd_validate(model: ContractModel, args) -> int:
    if args.format == "json":
        print(
            json.dumps(
                {
                    "ok": True,
                    "parties": sorted(model.parties),
                    "instruments": list(model.instrument_order),
                    "portfolios": list(model.portfolio_order),
                    "scenarios": list(model.scenario_order),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print(
            f"ok: {len(model.parties)} parties, {len(model.instruments)} instruments, "
            f"{len(model.portfolios)} portfolios, {len(model.scenarios)} scenarios"
        )
        for instrument_id in model.instrument_order:
            print(f"  {instrument_id}: {describe(model.instruments[instrument_id])}")
    return EXIT_OK


def _cmd_payoff(model: ContractModel, args) -> int:
    name, scenario = _scenario_for(model, args)
    owners = [args.portfolio] if args.portfolio else list(model.portfolio_order)
    blocks = []
    for owner in owners:
        if owner not in model.portfolios:
            raise ContractFileError(f"portfolio: unknown owner {owner!r}")
        portfolio = model.portfolios[owner]
        if args.format == "json":
            blocks.append(
                {
                    "portfolio": owner,
                    "scenario": name,
                    "total": jsonable_money(portfolio_payoff(portfolio, scenario)),
                }
            )
        else:
            blocks.append(render_payoff_table(portfolio, scenario, name))
    if args.grid:
        try:
            start_s, stop_s, step_s = args.grid.split(":")
        except ValueError:
            raise ContractFileError("grid: expected START:STOP:STEP") from None
        start = parse_money(start_s, model.currency)
        stop = parse_money(stop_s, model.currency)
        step = parse_money(step_s, model.currency)
        if step.minor_units <= 0:
            raise ContractFileError("grid: step must be positive")
        from dataclasses import replace

        rows = []
        units = start.minor_units
        while units <= stop.minor_units:
            grid_scenario = replace(
                scenario, terminal_price_per_share=Money(units, model.currency)
            )
            row = [format_money(Money(units, model.currency))]
            for owner in owners:
                row.append(
                    format_money(portfolio_payoff(model.portfolios[owner], grid_scenario))
                )
            rows.append(row)
            units += step.minor_units
        if args.format == "json":
            blocks.append({"grid": {"owners": owners, "rows": rows}})
        else:
            header = "  " + "price".rjust(16) + "".join(o.rjust(20) for o in owners)
            lines = [header]
            for row in rows:
                lines.append("  " + row[0].rjust(16) + "".join(v.rjust(20) for v in row[1:]))
            blocks.append("\n".join(lines))
    if args.format == "json":
        print(json.dumps(blocks, indent=2, sort_keys=True))
    else:
        print("\n\n".join(blocks))
    return EXIT_OK


def _settle_model(model: ContractModel, name: str, scenario: PriceScenario):
    loan, call, put = model.construction_instruments()
    shares = model.construction.counterparty_shares if model.construction else None
    result = settle(loan, call, put, scenario, counterparty_shares=shares)
    return result, loan, call, put


def _cmd_settle(model: ContractModel, args) -> int:
    name, scenario = _scenario_for(model, args)
    result, loan, call, put = _settle_model(model, name, scenario)
    if args.format == "json":
        print(json.dumps(settlement_to_json(result), indent=2, sort_keys=True))
    else:
        print(render_settlement_report(result, loan, call, put, name))
    return EXIT_OK


def _parity_report(model: ContractModel):
    loan, call, put = model.construction_instruments()
    if model.scenario_order:
        base = model.scenarios[model.scenario_order[0]]
        issuer = base.issuer
        initial = base.initial_price_per_share
    else:
        issuer = call.issuer
        if loan.principal.minor_units % call.quantity:
            raise ContractFileError(
                "parity: no scenario supplies the initial share price and the "
                "principal does not divide evenly over the quantity"
            )
        initial = Money(loan.principal.minor_units // call.quantity, model.currency)
    return check_parity_conditions(
        call, put, loan, issuer=issuer, initial_price=initial, quantity=call.quantity
    )


def _cmd_parity(model: ContractModel, args) -> int:
    report = _parity_report(model)
    if args.format == "json":
        print(json.dumps(conditions_to_json(report), indent=2, sort_keys=True))
    else:
        print(render_condition_report(report))
    return EXIT_OK


def _cmd_detect(model: ContractModel, args) -> int:
    if not model.detections:
        raise ContractFileError("detections: the file requests none")
    verdicts = []
    for request in model.detections:
        verdict = detect_constructive_trade(
            model.portfolios[request.portfolio], request.reference_issuer
        )
        verdicts.append((request.portfolio, verdict))
    if args.format == "json":
        print(
            json.dumps(
                [detection_to_json(owner, verdict) for owner, verdict in verdicts],
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print(render_detection_report(verdicts))
    found = any(v.kind is VerdictKind.CONSTRUCTIVE_TRADE for _, v in verdicts)
    return EXIT_CONSTRUCTIVE if found else EXIT_OK


def _cmd_report(model: ContractModel, args) -> int:
    if args.format == "json":
        payload: dict = {"scenarios": {}}
        for name in model.scenario_order:
            result, *_ = _settle_model(model, name, model.scenarios[name])
            payload["scenarios"][name] = settlement_to_json(result)
        payload["parity"] = conditions_to_json(_parity_report(model))
        if model.detections:
            payload["detections"] = [
                detection_to_json(
                    request.portfolio,
                    detect_constructive_trade(
                        model.portfolios[request.portfolio], request.reference_issuer
                    ),
                )
                for request in model.detections
            ]
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    sections: list[str] = []
    exit_code = EXIT_OK
    if model.scenario_order:
        first = model.scenarios[model.scenario_order[0]]
        loan, call, put = model.construction_instruments()
        sections.append("Hypothetical direct trade")
        sections.append(
            render_trade_gain_table(
                call.quantity, first.initial_price_per_share, first.terminal_price_per_share
            )
        )
    for name in model.scenario_order:
        result, loan, call, put = _settle_model(model, name, model.scenarios[name])
        sections.append(render_settlement_report(result, loan, call, put, name))
    sections.append(render_condition_report(_parity_report(model)))
    if model.detections:
        verdicts = [
            (
                request.portfolio,
                detect_constructive_trade(
                    model.portfolios[request.portfolio], request.reference_issuer
                ),
            )
            for request in model.detections
        ]
        sections.append(render_detection_report(verdicts))
        if any(v.kind is VerdictKind.CONSTRUCTIVE_TRADE for _, v in verdicts):
            exit_code = EXIT_CONSTRUCTIVE
    print("\n\n".join(sections))
    return exit_code


_COMMANDS = {
    "validate": _cmd_validate,
    "payoff": _cmd_payoff,
    "settle": _cmd_settle,
    "parity": _cmd_parity,
    "detect": _cmd_detect,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        model = load_contracts(args.file)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ContractFileError, ContractError, ExactnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](model, args)
    except (ContractFileError, ContractError, PayoffError, ExactnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SettlementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
