"""Report rendering: aligned text tables in the ledger layout and a
structured JSON form. All amounts print with thousands separators and
two decimals (negative table amounts in accounting parentheses);
identical inputs render byte-identical reports.
"""

from __future__ import annotations

from .instruments import (
    Loan,
    Option,
    OptionKind,
    Portfolio,
    describe,
    loan_maturity_value,
)
from .money import Money, format_money
from .parity import ConditionReport, DetectionVerdict, PayoffProfile, VerdictKind
from .payoff import PriceScenario, portfolio_payoff
from .settlement import (
    Deliver,
    ExerciseDecision,
    Pay,
    SettlementLedger,
    SettlementResult,
)

_WIDTH_LABEL = 52
_WIDTH_PER_SHARE = 14
_WIDTH_TOTAL = 20


def _accounting(amount: Money) -> str:
    text = format_money(Money(abs(amount.minor_units), amount.currency))
    return f"({text})" if amount.minor_units < 0 else text


def _row(label: str, per_share: Money | None, total: Money | None) -> str:
    per_share_s = _accounting(per_share) if per_share is not None else ""
    total_s = _accounting(total) if total is not None else ""
    return (
        f"  {label:<{_WIDTH_LABEL}}"
        f"{per_share_s:>{_WIDTH_PER_SHARE}}"
        f"{total_s:>{_WIDTH_TOTAL}}"
    )


def _rule(char: str = "-") -> str:
    return "  " + char * (_WIDTH_LABEL + _WIDTH_PER_SHARE + _WIDTH_TOTAL)


def render_scenario_header(name: str, scenario: PriceScenario) -> str:
    return (
        f"Scenario {name}: {scenario.issuer} at {format_money(scenario.terminal_price_per_share)} "
        f"per share on {scenario.terminal_date.isoformat()} "
        f"(initial {format_money(scenario.initial_price_per_share)})"
    )


def render_trade_gain_table(quantity: int, initial: Money, terminal: Money) -> str:
    """The hypothetical direct buy-then-sell outcome."""
    proceeds = terminal * quantity
    cost = initial * quantity
    lines = [
        _row("Selling Price (after announcement)", terminal, proceeds),
        _row("Less: Acquisition Cost (before announcement)", initial, cost),
        _rule(),
        _row("Gain from Direct Trade", terminal - initial, proceeds - cost),
    ]
    return "\n".join(lines)


def _ledger_lines(ledger: SettlementLedger) -> list[str]:
    lines = []
    for entry in ledger.entries:
        if isinstance(entry.obligation, Pay):
            what = f"pay {format_money(entry.obligation.amount)}"
        else:
            assert isinstance(entry.obligation, Deliver)
            what = f"deliver {entry.obligation.quantity:,} {entry.obligation.issuer}"
        source = describe(entry.source) if entry.source is not None else "net settlement"
        lines.append(
            f"    {entry.debtor.id} -> {entry.creditor.id}: {what:<36} [{entry.state.name.lower():<12}] {source}"
        )
    if not ledger.entries:
        lines.append("    (no outstanding obligations)")
    return lines


def render_settlement_report(
    result: SettlementResult,
    loan: Loan,
    call: Option,
    put: Option,
    scenario_name: str,
) -> str:
    scenario = result.scenario
    s_t = scenario.terminal_price_per_share
    quantity = call.quantity
    strike = call.strike_per_share
    beneficiary = loan.lender
    dealer = loan.borrower
    repay = loan_maturity_value(loan)

    out: list[str] = [render_scenario_header(scenario_name, scenario), ""]
    out.append(
        f"Exercise decisions: call {result.decisions['call'].value}, "
        f"put {result.decisions['put'].value}"
    )
    out.append("")
    for stage_name, ledger in result.stages:
        out.append(f"  [{stage_name}]")
        out.extend(_ledger_lines(ledger))
    out.append("")

    # which option (if either) drives the terminal cash difference
    if result.decisions["call"] is ExerciseDecision.EXERCISE:
        option_label = "Call Option"
        strike = call.strike_per_share
        quantity = call.quantity
    elif result.decisions["put"] is ExerciseDecision.EXERCISE:
        option_label = "Put Option"
        strike = put.strike_per_share
        quantity = put.quantity
    else:
        option_label = "Either Option"
    equity_leg_ps = s_t - strike
    equity_leg = equity_leg_ps * quantity
    if option_label == "Either Option":
        equity_leg_ps = Money(0, s_t.currency)
        equity_leg = Money(0, s_t.currency)

    out.append(f"{beneficiary.id}'s entitlement")
    out.append(_row(f"Monetary Equivalent of {scenario.issuer} Shares", s_t, s_t * quantity))
    out.append(_row("Less: Strike Price", strike, strike * quantity))
    out.append(_rule())
    out.append(_row(f"Payoff from {option_label}", equity_leg_ps, equity_leg))
    out.append(_row("Add: Loan Receivable", None, repay))
    out.append(_rule())
    out.append(
        _row(
            f"Total Amount Entitled ({scenario.terminal_date.isoformat()})",
            None,
            result.net_value(beneficiary.id),
        )
    )
    out.append("")

    dealer_payoff_ps = strike - s_t if option_label != "Either Option" else Money(0, s_t.currency)
    dealer_payoff = dealer_payoff_ps * quantity
    shares = result.positions[dealer.id].shares_held.get(scenario.issuer, 0)
    share_value = s_t * shares
    gross = dealer_payoff + share_value
    out.append(f"{dealer.id}'s position")
    out.append(_row("Strike Price", strike, strike * quantity))
    out.append(
        _row(f"Less: Monetary Equivalent of {scenario.issuer} Shares", s_t, s_t * quantity)
    )
    out.append(_rule())
    out.append(_row(f"Payoff from {option_label}", dealer_payoff_ps, dealer_payoff))
    out.append(_row(f"Add: Share Value ({scenario.terminal_date.isoformat()})", s_t, share_value))
    out.append(_rule())
    out.append(_row("Gross Position", None, gross))
    out.append(_row("Less: Loan Repayment", None, repay))
    out.append(_rule())
    out.append(_row("Net Position", None, result.net_value(dealer.id)))
    out.append("")

    for party_id in sorted(result.positions):
        pos = result.positions[party_id]
        held = ", ".join(f"{qty:,} {issuer}" for issuer, qty in sorted(pos.shares_held.items()))
        out.append(
            f"  {party_id}: net cash {_accounting(pos.net_cash)}; "
            f"shares held: {held or 'none'}; "
            f"title transferred: {'yes' if pos.title_transferred else 'no'}"
        )
    return "\n".join(out)


def render_condition_report(report: ConditionReport) -> str:
    out = ["Parity conditions"]
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        line = f"  [{status}] {check.name}"
        if check.detail:
            line += f" -- {check.detail}"
        out.append(line)
    out.append(f"  all six conditions {'hold' if report.all_pass else 'do not hold'}")
    return "\n".join(out)


def render_profile(profile: PayoffProfile) -> str:
    canon = profile.canonical()
    if not canon.breakpoints:
        shape = f"slope {canon.slopes[0]} everywhere"
    else:
        marks = ", ".join(format_money(Money(b, canon.currency)) for b in canon.breakpoints)
        slopes = ", ".join(str(s) for s in canon.slopes)
        shape = f"breakpoints at {marks}; slopes {slopes}"
    return f"intercept {format_money(canon.intercept)}; {shape}"


def render_detection_report(verdicts: list[tuple[str, DetectionVerdict]]) -> str:
    out = ["Detection"]
    for portfolio_id, verdict in verdicts:
        out.append(f"  {portfolio_id}: {verdict.describe()}")
        out.append(f"      profile: {render_profile(verdict.profile)}")
    return "\n".join(out)


def render_payoff_table(portfolio: Portfolio, scenario: PriceScenario, name: str) -> str:
    out = [f"Portfolio {portfolio.owner.id} under scenario {name}"]
    from .payoff import instrument_value  # single source of per-position values

    total = Money(0, scenario.terminal_price_per_share.currency)
    for pos in portfolio.positions:
        value = instrument_value(scenario, pos.instrument)
        signed = value if pos.side.value == "long" else -value
        total = total + signed
        out.append(_row(f"{pos.side.value} {describe(pos.instrument)}", None, signed))
    out.append(_rule())
    out.append(_row("Total", None, total))
    return "\n".join(out)


def jsonable_money(amount: Money) -> str:
    return format_money(amount)


def settlement_to_json(result: SettlementResult) -> dict:
    def entry_json(entry) -> dict:
        if isinstance(entry.obligation, Pay):
            obligation = {"pay": jsonable_money(entry.obligation.amount)}
        else:
            obligation = {
                "deliver": {"issuer": entry.obligation.issuer, "quantity": entry.obligation.quantity}
            }
        return {
            "debtor": entry.debtor.id,
            "creditor": entry.creditor.id,
            "obligation": obligation,
            "source": describe(entry.source) if entry.source is not None else None,
            "state": entry.state.name.lower(),
        }

    return {
        "scenario": {
            "issuer": result.scenario.issuer,
            "terminal_date": result.scenario.terminal_date.isoformat(),
            "terminal_price_per_share": jsonable_money(result.scenario.terminal_price_per_share),
            "initial_price_per_share": jsonable_money(result.scenario.initial_price_per_share),
        },
        "decisions": {name: decision.value for name, decision in result.decisions.items()},
        "stages": [
            {"name": name, "entries": [entry_json(entry) for entry in ledger.entries]}
            for name, ledger in result.stages
        ],
        "positions": {
            party_id: {
                "net_cash": jsonable_money(pos.net_cash),
                "shares_held": dict(sorted(pos.shares_held.items())),
                "title_transferred": pos.title_transferred,
                "net_value": jsonable_money(result.net_value(party_id)),
            }
            for party_id, pos in sorted(result.positions.items())
        },
    }


def conditions_to_json(report: ConditionReport) -> dict:
    return {
        "all_pass": report.all_pass,
        "checks": [
            {"name": check.name, "passed": check.passed, "detail": check.detail}
            for check in report.checks
        ],
    }


def detection_to_json(portfolio_id: str, verdict: DetectionVerdict) -> dict:
    return {
        "portfolio": portfolio_id,
        "verdict": verdict.kind.value,
        "issuer": verdict.issuer,
        "quantity": verdict.quantity,
        "direction": verdict.direction.value if verdict.direction else None,
        "exact_match": verdict.exact_match,
        "profile": {
            "intercept": jsonable_money(verdict.profile.intercept),
            "breakpoints": [
                jsonable_money(Money(b, verdict.profile.currency))
                for b in verdict.profile.breakpoints
            ],
            "slopes": [str(s) for s in verdict.profile.slopes],
        },
    }
