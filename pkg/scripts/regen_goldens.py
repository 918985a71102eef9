#!/usr/bin/env python3
"""Regenerate the golden CLI outputs under tests/golden/.

Run after an intentional report-format change, then review the diff;
the numeric content is independently pinned by the acceptance tests.
"""

import contextlib
import io
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from syntheq.cli import main  # noqa: E402

CONTRACT = str(ROOT / "contracts" / "abc_constructive_trade.json")
GOLDEN = ROOT / "tests" / "golden"

CASES = {
    "settle_rise.txt": ["settle", CONTRACT, "--scenario", "rise"],
    "settle_fall.txt": ["settle", CONTRACT, "--scenario", "fall"],
    "settle_flat.txt": ["settle", CONTRACT, "--scenario", "flat"],
    "settle_rise.json": ["settle", CONTRACT, "--scenario", "rise", "--format", "json"],
    "parity.txt": ["parity", CONTRACT],
    "detect.txt": ["detect", CONTRACT],
    "detect.json": ["detect", CONTRACT, "--format", "json"],
    "report.txt": ["report", CONTRACT],
}


def run() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, argv in CASES.items():
        buffer = io.StringIO()
        with contextlib.redirect_stdout(buffer):
            code = main(argv)
        if code not in (0, 2):
            raise SystemExit(f"{name}: unexpected exit code {code}")
        (GOLDEN / name).write_bytes(buffer.getvalue().encode("utf-8"))
        print(f"wrote {name} ({code=})")


if __name__ == "__main__":
    run()
