from __future__ import annotations

from pathlib import Path

import pytest

from reviewfactors.corpus import Polarity, Review, ReviewSet

ROOT = Path(__file__).resolve().parents[1]
DATA = Path(__file__).resolve().parent / "data"


def make_review(i: int, score: int, pos: str = "", neg: str = "", nat: str | None = None) -> Review:
    return Review(f"r{i}", "h1", score, positive_text=pos, negative_text=neg, nationality=nat)


@pytest.fixture
def every_score() -> ReviewSet:
    """Two reviews per score 1..10, each with both texts tagged by score."""
    reviews = []
    for s in range(1, 11):
        for j in range(2):
            i = 10 * s + j
            reviews.append(make_review(i, s, pos=f"pos{s} text {j}", neg=f"neg{s} text {j}"))
    return ReviewSet(tuple(reviews), "every-score")


@pytest.fixture
def positive() -> Polarity:
    return Polarity.POSITIVE


def planted_matrix(spec, seed: int, polarity: Polarity = Polarity.POSITIVE, marks=frozenset({"hotel"})):
    """TF-IDF rows of a synthetic corpus and the planted theme of each row."""
    from reviewfactors.corpus import generate_synthetic, select_polarity
    from reviewfactors.preprocess import PreprocessConfig, preprocess_pipeline
    from reviewfactors.vectorize import build_vocabulary, tfidf

    reviews, truth = generate_synthetic(spec, seed)
    docs, _, _ = preprocess_pipeline(select_polarity(reviews, polarity), PreprocessConfig(curated_marks=marks))
    vocab = build_vocabulary(docs)
    return tfidf(docs, vocab), [truth[d.review_id] for d in docs], docs, vocab


def agreement(labels, assignments) -> float:
    """Best one-to-one label agreement, by brute force over cluster relabelings."""
    import itertools

    import numpy as np

    names = sorted(set(labels))
    ks = sorted(set(int(a) for a in assignments))
    best = 0
    for perm in itertools.permutations(names, len(ks)):
        m = dict(zip(ks, perm))
        best = max(best, sum(m[int(a)] == t for a, t in zip(assignments, labels)))
    return best / len(labels) if len(labels) else float(np.nan)
