"""Regenerate the bundled synthetic hotel fixture and its theme truth map."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from reviewfactors.corpus import dump_reviews, generate_synthetic
from reviewfactors.fixtures import hotel_spec

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n-reviews", type=int, default=1200)
    ap.add_argument("--out", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()
    reviews, truth = generate_synthetic(hotel_spec(args.n_reviews), args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    dump_reviews(reviews, args.out / "hotel_reviews.jsonl")
    (args.out / "hotel_truth.json").write_text(json.dumps(truth, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{len(reviews)} reviews -> {args.out}")


if __name__ == "__main__":
    main()
