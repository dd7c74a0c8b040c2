"""N-gram vocabulary and sparse TF-IDF matrices.

Weights are ``count(d, t) * idf(t)`` with the smoothed
``idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1``, then rows are scaled to unit
Euclidean norm. On unit rows squared Euclidean distance is ``2 - 2 cos``, so
k-means on these rows groups by cosine similarity.

Matrices can be dumped as ``row col weight`` triplets with a tab-separated
``index term df`` vocabulary sidecar.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .preprocess import Document

__all__ = ["Vocabulary", "TfIdfMatrix", "ngrams", "build_vocabulary", "tfidf", "dump_matrix"]


def _tokens(doc: Document | Sequence[str]) -> Sequence[str]:
    return doc.tokens if isinstance(doc, Document) else doc


def ngrams(tokens: Sequence[str], ngram_max: int = 2) -> list[str]:
    """All contiguous n-grams for n = 1..ngram_max, space-joined, in text order."""
    out = []
    for n in range(1, ngram_max + 1):
        out.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return out


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    document_frequency: dict[str, int]
    n_docs: int
    ngram_max: int = 2
    min_df: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    @property
    def index(self) -> dict[str, int]:
        return self._index  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index  # type: ignore[attr-defined]

    def idf(self) -> np.ndarray:
        df = np.array([self.document_frequency[t] for t in self.terms], dtype=float)
        return np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "document_frequency": [self.document_frequency[t] for t in self.terms],
            "n_docs": self.n_docs,
            "ngram_max": self.ngram_max,
            "min_df": self.min_df,
        }


def build_vocabulary(
    docs: Sequence[Document | Sequence[str]], ngram_max: int = 2, min_df: int = 2
) -> Vocabulary:
    """Every n-gram (n <= ngram_max) found in at least ``min_df`` documents, indexed in sorted order."""
    if not docs:
        raise ValueError("cannot build a vocabulary from zero documents")
    if ngram_max < 1 or min_df < 1:
        raise ValueError("ngram_max and min_df must be >= 1")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(ngrams(_tokens(doc), ngram_max)))
    kept = sorted(t for t, c in df.items() if c >= min_df)
    return Vocabulary(tuple(kept), {t: df[t] for t in kept}, len(docs), ngram_max, min_df)


@dataclass(frozen=True)
class TfIdfMatrix:
    """Documents by terms, CSR storage. ``doc_ids`` align with rows."""

    matrix: sp.csr_matrix
    vocabulary: Vocabulary
    row_norm: str = "l2"
    doc_ids: tuple[str, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    def row(self, i: int) -> dict[int, float]:
        start, end = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return dict(zip(self.matrix.indices[start:end].tolist(), self.matrix.data[start:end].tolist()))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def subset(self, rows: Sequence[int]) -> TfIdfMatrix:
        rows = list(rows)
        ids = tuple(self.doc_ids[i] for i in rows) if self.doc_ids else ()
        return TfIdfMatrix(self.matrix[rows], self.vocabulary, self.row_norm, ids)


def tfidf(docs: Sequence[Document | Sequence[str]], vocab: Vocabulary, norm: str = "l2") -> TfIdfMatrix:
    if norm not in ("l2", "none"):
        raise ValueError(f"unknown row norm {norm!r}")
    idf = vocab.idf()
    index = vocab.index
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        counts = Counter(t for t in ngrams(_tokens(doc), vocab.ngram_max) if t in index)
        cols = sorted(index[t] for t in counts)
        weights = np.array([counts[vocab.terms[c]] * idf[c] for c in cols], dtype=float)
        if norm == "l2" and len(weights):
            weights /= np.sqrt(np.dot(weights, weights))
        indices.extend(cols)
        data.extend(weights.tolist())
        indptr.append(len(indices))
    mat = sp.csr_matrix(
        (np.array(data, dtype=float), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(docs), len(vocab)),
    )
    ids = tuple(d.review_id for d in docs) if docs and all(isinstance(d, Document) for d in docs) else ()
    return TfIdfMatrix(mat, vocab, norm, ids)


def dump_matrix(m: TfIdfMatrix, matrix_path: str | Path, vocab_path: str | Path) -> None:
    """Write ``row col weight`` triplets and an ``index term df`` sidecar."""
    coo = m.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with Path(matrix_path).open("w", encoding="utf-8", newline="\n") as fh:
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}\n")
    with Path(vocab_path).open("w", encoding="utf-8", newline="\n") as fh:
        for i, t in enumerate(m.vocabulary.terms):
            fh.write(f"{i}\t{t}\t{m.vocabulary.document_frequency[t]}\n")
