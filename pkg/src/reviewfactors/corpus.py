"""Review records: loading, statistics, score-based polarity selection, synthetic fixtures."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Polarity",
    "Review",
    "ReviewSet",
    "CorpusStats",
    "PolarityCorpus",
    "ReviewLoadError",
    "Theme",
    "SyntheticSpec",
    "load_reviews",
    "dump_reviews",
    "corpus_stats",
    "select_polarity",
    "generate_synthetic",
    "POSITIVE_SCORES",
    "NEGATIVE_SCORES",
]

log = logging.getLogger(__name__)

POSITIVE_SCORES = frozenset({7, 8, 9})
NEGATIVE_SCORES = frozenset({1, 2, 3})

FIELDS = ("id", "hotel_id", "score", "positive_text", "negative_text", "nationality", "date")


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class ReviewLoadError(ValueError):
    """Raised when a review file cannot be read or has too many invalid records."""


@dataclass(frozen=True)
class Review:
    id: str
    hotel_id: str
    score: int
    positive_text: str = ""
    negative_text: str = ""
    nationality: str | None = None
    date: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.score, bool) or not isinstance(self.score, int):
            raise ValueError(f"score must be an integer, got {self.score!r}")
        if not 1 <= self.score <= 10:
            raise ValueError(f"score {self.score} outside 1..10")
        if not self.id:
            raise ValueError("empty review id")
        if not (self.positive_text.strip() or self.negative_text.strip()):
            raise ValueError(f"review {self.id} has neither positive nor negative text")

    @classmethod
    def from_mapping(cls, rec: dict) -> Review:
        missing = [k for k in ("id", "hotel_id", "score", "positive_text", "negative_text") if k not in rec]
        if missing:
            raise ValueError(f"missing fields: {', '.join(missing)}")
        score = rec["score"]
        if isinstance(score, str):
            score = int(score.strip())
        elif isinstance(score, float) and score.is_integer():
            score = int(score)
        return cls(
            id=str(rec["id"]),
            hotel_id=str(rec["hotel_id"]),
            score=score,
            positive_text=rec["positive_text"] or "",
            negative_text=rec["negative_text"] or "",
            nationality=rec.get("nationality") or None,
            date=rec.get("date") or None,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ReviewSet:
    reviews: tuple[Review, ...]
    source: str
    skipped: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "reviews", tuple(self.reviews))
        object.__setattr__(self, "skipped", tuple(self.skipped))
        seen: set[str] = set()
        for r in self.reviews:
            if r.id in seen:
                raise ValueError(f"duplicate review id {r.id!r}")
            seen.add(r.id)

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self):
        return iter(self.reviews)

    @property
    def skip_count(self) -> int:
        return len(self.skipped)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for r in self.reviews:
            h.update(json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


@dataclass(frozen=True)
class CorpusStats:
    total: int
    score_histogram: dict[int, tuple[int, float]]
    nationality_histogram: dict[str, tuple[int, float]]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "score_histogram": {str(k): [c, p] for k, (c, p) in self.score_histogram.items()},
            "nationality_histogram": {k: [c, p] for k, (c, p) in self.nationality_histogram.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> CorpusStats:
        return cls(
            total=d["total"],
            score_histogram={int(k): (v[0], v[1]) for k, v in d["score_histogram"].items()},
            nationality_histogram={k: (v[0], v[1]) for k, v in d["nationality_histogram"].items()},
        )


@dataclass(frozen=True)
class PolarityCorpus:
    polarity: Polarity
    texts: tuple[tuple[str, str], ...]
    source_hash: str = ""

    def __len__(self) -> int:
        return len(self.texts)


# -- ingestion ---------------------------------------------------------------


def _iter_jsonl(text: str) -> Iterable[tuple[int, dict | Exception]]:
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, exc
            continue
        if not isinstance(obj, dict):
            yield lineno, ValueError("record is not a JSON object")
            continue
        yield lineno, obj


def _iter_csv(text: str) -> Iterable[tuple[int, dict | Exception]]:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if reader.fieldnames is None:
        return
    missing = {"id", "hotel_id", "score", "positive_text", "negative_text"} - set(reader.fieldnames)
    if missing:
        raise ReviewLoadError(f"csv header lacks columns: {', '.join(sorted(missing))}")
    for row in reader:
        # reader.line_num is the physical line the record ended on
        yield reader.line_num, dict(row)


def load_reviews(path: str | Path, format: str | None = None, max_invalid_fraction: float = 0.10) -> ReviewSet:
    """Load scored reviews from a JSONL or CSV file.

    Invalid records are logged with their line numbers and skipped. If more than
    ``max_invalid_fraction`` of the records are invalid the whole load fails.

    Args:
        path: file to read.
        format: ``"jsonl"`` or ``"csv"``; inferred from the suffix when omitted.
        max_invalid_fraction: tolerated share of invalid records.

    Returns:
        The valid records in file order, with ``skipped`` listing ``(line, reason)``.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in ("jsonl", "csv"):
        raise ReviewLoadError(f"unsupported review format {fmt!r} for {path}")
    try:
        text = path.read_bytes().decode("utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        raise ReviewLoadError(f"cannot read {path}: {exc}") from exc

    records = _iter_jsonl(text) if fmt == "jsonl" else _iter_csv(text)
    reviews: list[Review] = []
    skipped: list[tuple[int, str]] = []
    seen: set[str] = set()
    for lineno, rec in records:
        if isinstance(rec, Exception):
            skipped.append((lineno, str(rec)))
            continue
        try:
            review = Review.from_mapping(rec)
        except (ValueError, TypeError) as exc:
            skipped.append((lineno, str(exc)))
            continue
        if review.id in seen:
            skipped.append((lineno, f"duplicate review id {review.id!r}"))
            continue
        seen.add(review.id)
        reviews.append(review)

    for lineno, reason in skipped:
        log.warning("%s:%d: skipped record: %s", path, lineno, reason)
    n = len(reviews) + len(skipped)
    if n and len(skipped) / n > max_invalid_fraction:
        raise ReviewLoadError(
            f"{path}: {len(skipped)} of {n} records invalid (limit {max_invalid_fraction:.0%}); "
            f"first at line {skipped[0][0]}: {skipped[0][1]}"
        )
    return ReviewSet(tuple(reviews), str(path), tuple(skipped))


def dump_reviews(reviews: Iterable[Review], path: str | Path, format: str | None = None) -> None:
    """Write reviews in the same formats :func:`load_reviews` reads."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "jsonl":
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for r in reviews:
                fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")
    elif fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=FIELDS, quoting=csv.QUOTE_MINIMAL)
            writer.writeheader()
            for r in reviews:
                row = r.to_dict()
                writer.writerow({k: ("" if row[k] is None else row[k]) for k in FIELDS})
    else:
        raise ValueError(f"unsupported review format {fmt!r}")


# -- statistics and selection -------------------------------------------------


def _histogram(counter: Counter, total: int) -> dict:
    # descending count, then key, so renderings are stable
    items = sorted(counter.items(), key=lambda kv: (-kv[1], str(kv[0])))
    return {k: (c, 100.0 * c / total) for k, c in items}


def corpus_stats(reviews: ReviewSet | Sequence[Review]) -> CorpusStats:
    """Score and nationality histograms with counts and percentages of the total."""
    reviews = list(reviews)
    total = len(reviews)
    if total == 0:
        return CorpusStats(0, {}, {})
    scores = Counter(r.score for r in reviews)
    nats = Counter(r.nationality for r in reviews if r.nationality)
    return CorpusStats(total, _histogram(scores, total), _histogram(nats, total))


def select_polarity(
    reviews: ReviewSet,
    polarity: Polarity | str,
    positive_scores: Iterable[int] = POSITIVE_SCORES,
    negative_scores: Iterable[int] = NEGATIVE_SCORES,
) -> PolarityCorpus:
    """Pick the review texts that feed one polarity corpus.

    Positive takes the positive text of reviews scored 7-9, negative takes the
    negative text of reviews scored 1-3; every other score is ignored. Empty
    texts are not emitted.
    """
    polarity = Polarity(polarity)
    if polarity is Polarity.POSITIVE:
        scores, attr = frozenset(positive_scores), "positive_text"
    else:
        scores, attr = frozenset(negative_scores), "negative_text"
    texts = tuple(
        (r.id, getattr(r, attr)) for r in reviews if r.score in scores and getattr(r, attr).strip()
    )
    src = reviews.content_hash() if isinstance(reviews, ReviewSet) else ""
    return PolarityCorpus(polarity, texts, src)


# -- synthetic fixtures -------------------------------------------------------


@dataclass(frozen=True)
class Theme:
    """One planted theme: a term pool tied to a polarity and a score range."""

    name: str
    polarity: Polarity
    words: tuple[str, ...]
    scores: tuple[int, int]
    weight: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "scores", tuple(self.scores))
        if not self.words:
            raise ValueError(f"theme {self.name!r} has an empty term pool")
        lo, hi = self.scores
        if not 1 <= lo <= hi <= 10:
            raise ValueError(f"theme {self.name!r} has invalid score range {self.scores}")


@dataclass(frozen=True)
class SyntheticSpec:
    themes: tuple[Theme, ...]
    n_reviews: int = 300
    min_words: int = 6
    max_words: int = 12
    filler: tuple[str, ...] = ()
    filler_rate: float = 0.0
    nationalities: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "themes", tuple(self.themes))
        if not self.themes:
            raise ValueError("synthetic spec needs at least one theme")
        pools = [set(t.words) for t in self.themes]
        for i in range(len(pools)):
            for j in range(i + 1, len(pools)):
                if pools[i] & pools[j]:
                    raise ValueError(
                        f"themes {self.themes[i].name!r} and {self.themes[j].name!r} share terms"
                    )
        if not 1 <= self.min_words <= self.max_words:
            raise ValueError("need 1 <= min_words <= max_words")


def generate_synthetic(spec: SyntheticSpec, seed: int) -> tuple[ReviewSet, dict[str, str]]:
    """Sample a review set with planted themes.

    Returns the review set and, separately, a map from review id to the name of
    the theme it was drawn from. The map is the test oracle and never travels
    with the reviews.
    """
    rng = np.random.default_rng(seed)
    weights = np.array([t.weight for t in spec.themes], dtype=float)
    weights /= weights.sum()
    reviews = []
    truth: dict[str, str] = {}
    width = len(str(spec.n_reviews))
    for i in range(spec.n_reviews):
        theme = spec.themes[int(rng.choice(len(spec.themes), p=weights))]
        length = int(rng.integers(spec.min_words, spec.max_words + 1))
        words = []
        for _ in range(length):
            if spec.filler and rng.random() < spec.filler_rate:
                words.append(spec.filler[int(rng.integers(len(spec.filler)))])
            else:
                words.append(theme.words[int(rng.integers(len(theme.words)))])
        text = " ".join(words)
        text = text[0].upper() + text[1:] + "."
        score = int(rng.integers(theme.scores[0], theme.scores[1] + 1))
        nat = spec.nationalities[int(rng.integers(len(spec.nationalities)))] if spec.nationalities else None
        rid = f"syn-{seed}-{i:0{width}d}"
        if theme.polarity is Polarity.POSITIVE:
            review = Review(rid, f"h{i % 7}", score, positive_text=text, nationality=nat)
        else:
            review = Review(rid, f"h{i % 7}", score, negative_text=text, nationality=nat)
        reviews.append(review)
        truth[rid] = theme.name
    return ReviewSet(tuple(reviews), f"synthetic:{seed}"), truth
