"""Regenerate the committed golden outputs of the bundled hotel configuration.

Review the diff by hand before committing: cluster counts, planted terms in each
aggregate list and the before/after counts should all still hold.
"""

from __future__ import annotations

import shutil
from pathlib import Path

from reviewfactors.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden" / "hotel"


def main_() -> int:
    if GOLDEN.exists():
        shutil.rmtree(GOLDEN)
    return main(["analyze", "--config", str(ROOT / "configs" / "hotel.yaml"), "--out", str(GOLDEN)])


if __name__ == "__main__":
    raise SystemExit(main_())
