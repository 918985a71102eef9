#!/usr/bin/env python3
"""Randomized sweep of the replication identity.

Draws random (quantity, initial price, rate) triples with exact
interest, synthesizes the bundle, and checks that its payoff equals the
share value at every probe price. Prints a summary; exits nonzero on
the first violation (there should never be one).

Run:  python scripts/parity_sweep.py [--cases N] [--seed S]
"""

import argparse
import random
import sys
import time
from datetime import date
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from syntheq import Money, Party, make_rate, portfolio_payoff, synthesize_long_stock
from syntheq.payoff import PriceScenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=2000)
    parser.add_argument("--probes", type=int, default=50)
    parser.add_argument("--seed", type=int, default=20150104)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    investor, dealer = Party("X"), Party("Y")
    trade_date, settle_date = date(2015, 1, 4), date(2016, 1, 4)

    started = time.perf_counter()
    checked = 0
    for case in range(args.cases):
        denominator = rng.randint(1, 100)
        initial = Money(denominator * rng.randint(1, 10_000 // denominator))
        quantity = rng.randint(1, 1_000_000)
        rate = make_rate(rng.randint(0, 2 * denominator), denominator)
        bundle = synthesize_long_stock(
            "ABC", quantity, initial, rate, trade_date, settle_date, investor, dealer
        )
        strike = bundle.positions[1].instrument.strike_per_share.minor_units
        probes = [0, strike] + [rng.randint(0, 4 * strike) for _ in range(args.probes)]
        for units in probes:
            scenario = PriceScenario("ABC", settle_date, Money(units), initial)
            expected = Money(units) * quantity
            actual = portfolio_payoff(bundle, scenario)
            if actual != expected:
                print(
                    f"VIOLATION case={case} qty={quantity} initial={initial} "
                    f"rate={rate} price={units}: {actual} != {expected}"
                )
                return 1
            checked += 1
    elapsed = time.perf_counter() - started
    print(
        f"replication held at {checked:,} probe points across {args.cases:,} "
        f"random constructions ({elapsed:.2f}s)"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
