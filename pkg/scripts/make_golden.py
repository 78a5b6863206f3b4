"""Regenerate the committed golden report for configs/simulate_example.json.

Only run this after a deliberate change to the sampling or report format.
"""

import sys
from pathlib import Path

from extch.cli import main

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "simulate",
                "--config", str(ROOT / "configs" / "simulate_example.json"),
                "--out", str(ROOT / "tests" / "golden" / "simulate_example"),
            ]
        )
    )
