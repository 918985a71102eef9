#!/usr/bin/env python3
"""Walk the loan-plus-two-options construction end to end.

Builds the three contracts, settles them at the rising, falling and
flat terminal prices, prints every intermediate ledger table, and runs
the detector on both sides. A compact tour of the whole engine.

Run:  python scripts/run_construction.py [--qty N] [--initial PRICE] [--rate N/D]
"""

import argparse
import sys
from datetime import date
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from syntheq import (
    Party,
    Portfolio,
    PriceScenario,
    Side,
    Stock,
    check_parity_conditions,
    detect_constructive_trade,
    economic_equivalence,
    parse_money,
    parse_rate,
    position,
    settle,
    synthesize_loan,
    synthesize_long_stock,
)
from syntheq.report import (
    render_condition_report,
    render_detection_report,
    render_settlement_report,
    render_trade_gain_table,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qty", type=int, default=1_000_000)
    parser.add_argument("--initial", default="100.00")
    parser.add_argument("--rate", default="5/100")
    parser.add_argument("--prices", default="150.00,80.00,105.00", help="terminal prices")
    args = parser.parse_args()

    investor, dealer = Party("X"), Party("Y")
    trade_date, settle_date = date(2015, 1, 4), date(2016, 1, 4)
    initial = parse_money(args.initial)
    rate = parse_rate(args.rate)

    bundle = synthesize_long_stock(
        "ABC", args.qty, initial, rate, trade_date, settle_date, investor, dealer
    )
    loan, call, put = (pos.instrument for pos in bundle.positions)

    terminal_prices = [parse_money(p) for p in args.prices.split(",")]
    print("Hypothetical direct trade at the first terminal price")
    print(render_trade_gain_table(args.qty, initial, terminal_prices[0]))

    for terminal in terminal_prices:
        scenario = PriceScenario("ABC", settle_date, terminal, initial)
        result = settle(loan, call, put, scenario)
        print()
        print(render_settlement_report(result, loan, call, put, "sweep"))

    print()
    report = check_parity_conditions(
        call, put, loan, issuer="ABC", initial_price=initial, quantity=args.qty
    )
    print(render_condition_report(report))

    direct = Portfolio(investor, (position(investor, Stock("ABC", args.qty), Side.LONG),))
    equivalence = economic_equivalence(bundle, direct)
    print()
    print(f"bundle vs outright block: {'equivalent' if equivalence.equivalent else 'divergent'}")

    synthetic_loan = synthesize_loan(
        "ABC", args.qty, initial, rate, trade_date, settle_date, dealer, investor
    )
    verdicts = [
        ("X", detect_constructive_trade(bundle, "ABC")),
        ("Y", detect_constructive_trade(synthetic_loan, "ABC")),
        ("direct", detect_constructive_trade(direct, "ABC")),
    ]
    print()
    print(render_detection_report(verdicts))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
