from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewfactors.corpus import Polarity
from reviewfactors.preprocess import Document
from reviewfactors.vectorize import Vocabulary, build_vocabulary, dump_matrix, ngrams, tfidf


def test_ngrams_order_sensitive():
    assert ngrams(["excel", "locat", "excel"]) == ["excel", "locat", "excel", "excel locat", "locat excel"]
    assert ngrams(["a"], 3) == ["a"]
    assert ngrams([], 2) == []


def test_vocabulary_tiny_exhaustive():
    v = build_vocabulary([["a", "b"], ["a", "b"]], min_df=2)
    assert v.terms == ("a", "a b", "b")
    assert v.index == {"a": 0, "a b": 1, "b": 2}


def test_vocabulary_threshold_excludes_everything():
    v = build_vocabulary([["a", "b"], ["a", "b"]], min_df=3)
    assert len(v) == 0
    assert tfidf([["a", "b"]], v).shape == (1, 0)


def test_vocabulary_rejects_empty_corpus():
    with pytest.raises(ValueError):
        build_vocabulary([])


def test_vocabulary_brute_force():
    rng = random.Random(11)
    docs = [[rng.choice("abcdefg") for _ in range(rng.randint(0, 9))] for _ in range(50)]
    v = build_vocabulary(docs, ngram_max=2, min_df=2)
    expected = set()
    grams = set()
    for d in docs:
        grams.update(d)
        grams.update(f"{x} {y}" for x, y in zip(d, d[1:]))
    for g in grams:
        df = 0
        for d in docs:
            parts = g.split(" ")
            if any(d[i : i + len(parts)] == parts for i in range(len(d))):
                df += 1
        if df >= 2:
            expected.add(g)
            assert v.document_frequency[g] == df
    assert set(v.terms) == expected
    assert list(v.terms) == sorted(v.terms)
    assert sorted(v.index.values()) == list(range(len(v)))


def test_hand_corpus_exact_values():
    docs = [["a", "b", "a", "b"], ["a", "b", "c"], ["c", "a"]]
    v = build_vocabulary(docs)
    # bigrams "b a", "b c", "c a" occur once and fall below min_df
    assert v.terms == ("a", "a b", "b", "c")
    assert [v.document_frequency[t] for t in v.terms] == [3, 2, 2, 2]
    L = math.log(4 / 3) + 1  # idf of a term in 2 of 3 documents; idf(a) = ln(4/4) + 1 = 1
    n0 = math.sqrt(2**2 + 2 * (2 * L) ** 2)  # row 0: a=2, "a b"=2L, b=2L, c=0
    n1 = math.sqrt(1 + 3 * L**2)
    n2 = math.sqrt(1 + L**2)
    expected = np.array(
        [
            [2 / n0, 2 * L / n0, 2 * L / n0, 0.0],
            [1 / n1, L / n1, L / n1, L / n1],
            [1 / n2, 0.0, 0.0, L / n2],
        ]
    )
    got = tfidf(docs, v).toarray()
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)
    raw = tfidf(docs, v, norm="none").toarray()
    np.testing.assert_allclose(raw[0], [2, 2 * L, 2 * L, 0], rtol=0, atol=1e-12)


def test_idf_of_ubiquitous_term_is_one():
    v = build_vocabulary([["x", "y"], ["x"], ["x", "z"]], ngram_max=1, min_df=1)
    assert v.idf()[v.index["x"]] == 1.0


def test_single_document_unit_row():
    v = build_vocabulary([["x", "x"]], min_df=1)
    assert v.terms == ("x", "x x")
    row = tfidf([["x", "x"]], v).toarray()[0]
    assert abs(np.linalg.norm(row) - 1) < 1e-12


def test_out_of_vocabulary_ignored_and_empty_rows():
    v = build_vocabulary([["a", "b"], ["a", "b"]])
    m = tfidf([["q", "r"], ["a", "q"]], v)
    assert m.matrix[0].nnz == 0
    assert m.row(1) == {v.index["a"]: 1.0}


def test_doc_ids_and_subset():
    docs = [Document(f"d{i}", Polarity.NEGATIVE, ("a", "b", "c")) for i in range(3)]
    m = tfidf(docs, build_vocabulary(docs))
    assert m.doc_ids == ("d0", "d1", "d2")
    sub = m.subset([2, 0])
    assert sub.doc_ids == ("d2", "d0") and sub.shape == (2, m.shape[1])


def test_dump_matrix(tmp_path):
    docs = [["a", "b", "a", "b"], ["a", "b", "c"], ["c", "a"]]
    m = tfidf(docs, build_vocabulary(docs))
    dump_matrix(m, tmp_path / "m.txt", tmp_path / "v.tsv")
    triplets = [line.split() for line in (tmp_path / "m.txt").read_text().splitlines()]
    assert len(triplets) == m.matrix.nnz
    dense = np.zeros(m.shape)
    for r, c, w in triplets:
        dense[int(r), int(c)] = float(w)
    np.testing.assert_array_equal(dense, m.toarray())
    sidecar = [line.split("\t") for line in (tmp_path / "v.tsv").read_text().splitlines()]
    assert sidecar[1] == ["1", "a b", "2"]


# -- properties over random corpora ------------------------------------------

corpora = st.lists(st.lists(st.sampled_from("abcdefgh"), max_size=10), min_size=1, max_size=12)


@settings(max_examples=200, deadline=None)
@given(corpora)
def test_rows_unit_norm_nonnegative_finite(docs):
    v = build_vocabulary(docs, min_df=1)
    m = tfidf(docs, v).toarray()
    assert np.all(m >= 0) and np.all(np.isfinite(m))
    norms = np.linalg.norm(m, axis=1)
    for d, n in zip(docs, norms):
        assert (abs(n - 1) <= 1e-9) if d else n == 0
    assert all(v.document_frequency[t] <= v.n_docs for t in v.terms)


@settings(max_examples=200, deadline=None)
@given(corpora)
def test_scale_invariance(docs):
    # unigram counts double exactly when a document is repeated
    v = build_vocabulary(docs, ngram_max=1, min_df=1)
    once = tfidf(docs, v).toarray()
    twice = tfidf([d + d for d in docs], v).toarray()
    np.testing.assert_allclose(once, twice, rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(corpora, st.randoms())
def test_permutation_equivariance(docs, rnd):
    perm = list(range(len(docs)))
    rnd.shuffle(perm)
    v = build_vocabulary(docs)
    v_perm = build_vocabulary([docs[i] for i in perm])
    assert v_perm == v
    a = tfidf(docs, v).toarray()
    b = tfidf([docs[i] for i in perm], v).toarray()
    np.testing.assert_array_equal(b, a[perm])


def test_vocabulary_dict():
    v = build_vocabulary([["a", "b"], ["a", "b"]])
    d = v.to_dict()
    assert d["terms"] == ["a", "a b", "b"] and d["document_frequency"] == [2, 2, 2]
    assert isinstance(v, Vocabulary)


def test_bigram_only_in_order():
    docs = [["excel", "locat"], ["excel", "locat"], ["locat", "excel"]]
    v = build_vocabulary(docs, min_df=1)
    assert {"excel locat", "locat excel"} <= set(v.terms)
    assert v.document_frequency["excel locat"] == 2
    assert len(v) == 4
