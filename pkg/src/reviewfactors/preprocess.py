"""Turn raw polarity corpora into stemmed, stopword-free token documents.

The pipeline runs four steps in a fixed order: tokenize and stem, build the
stopword list from corpus frequencies, remove stopwords, drop documents that
end up shorter than ``min_tokens``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Polarity, PolarityCorpus
from .porter import stem

__all__ = [
    "Document",
    "FrequencyTable",
    "StopwordList",
    "StopwordError",
    "PreprocessConfig",
    "PipelineReport",
    "tokenize",
    "stem",
    "analyze",
    "normalize_terms",
    "load_wordlist",
    "default_base_stopwords",
    "default_adjective_stoplist",
    "term_frequencies",
    "build_stopwords",
    "remove_stopwords",
    "filter_short",
    "preprocess_pipeline",
]

_APOSTROPHE = "'’"


class StopwordError(ValueError):
    """A curated stopword mark is not among the frequency candidates."""


@dataclass(frozen=True)
class Document:
    review_id: str
    polarity: Polarity
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class FrequencyTable:
    counts: dict[str, int]

    def ranked(self) -> list[str]:
        """Terms by descending count, ties in lexicographic order."""
        return sorted(self.counts, key=lambda t: (-self.counts[t], t))

    def top(self, n: int) -> list[str]:
        return self.ranked()[:n]

    def __getitem__(self, term: str) -> int:
        return self.counts[term]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class StopwordList:
    base: frozenset[str]
    generated: frozenset[str] = frozenset()
    candidates: tuple[str, ...] = ()

    @property
    def full(self) -> frozenset[str]:
        return self.base | self.generated

    def __contains__(self, term: str) -> bool:
        return term.lower() in self.full


@dataclass(frozen=True)
class PreprocessConfig:
    base_stopwords: frozenset[str] | None = None  # None -> bundled English list
    curated_marks: frozenset[str] = frozenset()
    top_n: int = 30
    min_tokens: int = 3


@dataclass(frozen=True)
class PipelineReport:
    polarity: Polarity
    before: int
    after: int
    dropped_empty: int
    dropped_short: int
    candidates: tuple[str, ...]
    generated_stopwords: tuple[str, ...]
    tokens_before: int
    tokens_after: int

    def to_dict(self) -> dict:
        return {
            "polarity": self.polarity.value,
            "before": self.before,
            "after": self.after,
            "dropped_empty": self.dropped_empty,
            "dropped_short": self.dropped_short,
            "candidates": list(self.candidates),
            "generated_stopwords": list(self.generated_stopwords),
            "tokens_before": self.tokens_before,
            "tokens_after": self.tokens_after,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PipelineReport:
        return cls(
            polarity=Polarity(d["polarity"]),
            before=d["before"],
            after=d["after"],
            dropped_empty=d["dropped_empty"],
            dropped_short=d["dropped_short"],
            candidates=tuple(d["candidates"]),
            generated_stopwords=tuple(d["generated_stopwords"]),
            tokens_before=d["tokens_before"],
            tokens_after=d["tokens_after"],
        )


def tokenize(text: str) -> list[str]:
    """Lowercased alphabetic word units.

    Digits (including numeric symbols like "¼") and punctuation split words
    and are dropped; an apostrophe between two letters is removed so
    contractions stay one token.

    >>> tokenize("Didn't like room 12!")
    ['didnt', 'like', 'room']
    """
    text = text.lower()
    chars = []
    for i, ch in enumerate(text):
        if ch.isalpha():
            chars.append(ch)
        elif ch in _APOSTROPHE and 0 < i < len(text) - 1 and text[i - 1].isalpha() and text[i + 1].isalpha():
            continue
        else:
            chars.append(" ")
    return "".join(chars).split()


def analyze(text: str) -> list[str]:
    """Tokenize then stem."""
    return [stem(t) for t in tokenize(text)]


def normalize_terms(words: Iterable[str]) -> frozenset[str]:
    """Map surface words (e.g. ``"didn't"``) to the stemmed form used for matching."""
    out: set[str] = set()
    for w in words:
        out.update(analyze(w))
    return frozenset(out)


def load_wordlist(path: str | Path) -> list[str]:
    """Read a one-word-per-line file, ignoring blank lines and ``#`` comments."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(line)
    return words


def _bundled(name: str) -> list[str]:
    ref = resources.files("reviewfactors") / "data" / name
    with resources.as_file(ref) as p:
        return load_wordlist(p)


def default_base_stopwords() -> frozenset[str]:
    """Bundled English function words, stemmed."""
    return normalize_terms(_bundled("stopwords_en.txt"))


def default_adjective_stoplist() -> frozenset[str]:
    return frozenset(_bundled("evaluative_adjectives.txt"))


def term_frequencies(docs: Iterable[Sequence[str]]) -> FrequencyTable:
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc)
    return FrequencyTable(dict(counts))


def build_stopwords(
    freq: FrequencyTable,
    base: Iterable[str],
    curated_marks: Iterable[str] = (),
    top_n: int = 30,
) -> StopwordList:
    """Combine base stopwords with curated picks from the most frequent terms.

    Candidates are the ``top_n`` most frequent terms that are not already base
    stopwords. Choosing which candidates are meaningless is left to the caller;
    every mark must be a candidate (or already a base stopword).

    Raises:
        StopwordError: a mark is neither a candidate nor a base stopword.
    """
    base = frozenset(base)
    candidates = tuple(t for t in freq.ranked() if t not in base)[:top_n]
    cand_set = set(candidates)
    generated: set[str] = set()
    bad = []
    for mark in curated_marks:
        mark = mark.lower()
        if mark in cand_set or mark in base:
            forms = [mark]
        else:
            forms = analyze(mark)
        for f in forms:
            if f in cand_set:
                generated.add(f)
            elif f not in base:
                bad.append(mark if f == mark else f"{mark} ({f})")
    if bad:
        raise StopwordError(f"curated stopword(s) not among the top {top_n} candidates: {', '.join(sorted(bad))}")
    return StopwordList(base, frozenset(generated), candidates)


def remove_stopwords(doc: Sequence[str], stops: StopwordList | Iterable[str]) -> list[str]:
    full = stops.full if isinstance(stops, StopwordList) else frozenset(stops)
    return [t for t in doc if t not in full]


def filter_short(docs: Sequence[Document], min_tokens: int = 3) -> tuple[list[Document], int]:
    """Keep documents with at least ``min_tokens`` tokens; also return how many were dropped."""
    kept = [d for d in docs if len(d.tokens) >= min_tokens]
    return kept, len(docs) - len(kept)


def preprocess_pipeline(
    corpus: PolarityCorpus, config: PreprocessConfig = PreprocessConfig()
) -> tuple[list[Document], StopwordList, PipelineReport]:
    base = default_base_stopwords() if config.base_stopwords is None else frozenset(config.base_stopwords)

    stemmed = [analyze(text) for _, text in corpus.texts]
    freq = term_frequencies(stemmed)
    stops = build_stopwords(freq, base, config.curated_marks, config.top_n)
    docs = [
        Document(rid, corpus.polarity, tuple(remove_stopwords(toks, stops)))
        for (rid, _), toks in zip(corpus.texts, stemmed)
    ]
    kept, dropped = filter_short(docs, config.min_tokens)

    report = PipelineReport(
        polarity=corpus.polarity,
        before=len(corpus.texts),
        after=len(kept),
        dropped_empty=sum(1 for d in docs if not d.tokens),
        dropped_short=dropped,
        candidates=stops.candidates,
        generated_stopwords=tuple(sorted(stops.generated)),
        tokens_before=sum(len(t) for t in stemmed),
        tokens_after=sum(len(d.tokens) for d in kept),
    )
    return kept, stops, report
