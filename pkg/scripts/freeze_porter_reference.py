"""Freeze a Porter reference word list into tests/data/porter_reference.tsv.

One-off maintenance script. It needs NLTK, which the package itself does not
depend on. NLTK's ``MARTIN_EXTENSIONS`` mode reproduces the output list that
accompanies the canonical C implementation. Its output is written next to
each word so the test suite can check ``reviewfactors.porter`` without
importing NLTK.

Usage:
    python scripts/freeze_porter_reference.py WORDLIST [WORDLIST ...]

If the canonical ``voc.txt``/``output.txt`` pair is available, check it
directly with ``PORTER_VOC=... PORTER_OUT=... pytest tests/test_porter.py``.
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

from nltk.stem.porter import PorterStemmer

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "porter_reference.tsv"


def main(paths: list[str]) -> None:
    words: set[str] = set()
    for p in paths:
        for line in Path(p).read_text(encoding="utf-8").splitlines():
            w = line.strip()
            if re.fullmatch(r"[a-z]+", w):
                words.add(w)
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    lines = [f"{w}\t{stemmer.stem(w)}" for w in sorted(words)]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} pairs to {OUT}")


if __name__ == "__main__":
    main(sys.argv[1:])
