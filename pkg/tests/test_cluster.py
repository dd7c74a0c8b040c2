from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import agreement, planted_matrix
from reviewfactors.cluster import (
    ClusteringError,
    ClusteringResult,
    ElbowCurve,
    KMeansConfig,
    choose_elbow,
    derive_seed,
    elbow_sweep,
    inertia,
    kmeans,
    read_elbow,
    squared_distances,
    write_elbow,
)
from reviewfactors.fixtures import planted_spec


def _blobs(seed: int, n: int = 40, d: int = 5, sep: float = 6.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0, 1, (n, d))
    b = rng.normal(sep, 1, (n, d))
    return np.vstack([a, b]), np.repeat([0, 1], n)


def _certificate(X, res, atol=1e-9):
    D = np.sqrt(squared_distances(sp.csr_matrix(X), res.centroids))
    own = D[np.arange(len(res.assignments)), res.assignments]
    return bool(np.all(own <= D.min(axis=1) + atol))


# -- kmeans analytic cases ----------------------------------------------------


def test_k_equals_n_is_exact_fit():
    X = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [3.0, 2.0]])
    res = kmeans(X, KMeansConfig(k=4, seed=1))
    assert res.inertia == 0.0
    assert sorted(res.assignments.tolist()) == [0, 1, 2, 3]


def test_k_one_is_mean_and_total_variance():
    X, _ = _blobs(0)
    res = kmeans(X, KMeansConfig(k=1, seed=3))
    np.testing.assert_allclose(res.centroids[0], X.mean(axis=0), rtol=0, atol=1e-12)
    assert res.inertia == pytest.approx(((X - X.mean(axis=0)) ** 2).sum(), rel=1e-12)


def test_planted_two_theme_corpus_recovered():
    spec = planted_spec(2, n_reviews=200)
    for seed in range(20):
        m, labels, _, _ = planted_matrix(spec, seed)
        res = kmeans(m, KMeansConfig(k=2, seed=seed))
        assert agreement(labels, res.assignments) == 1.0


def test_gaussian_blobs_recovered():
    for seed in range(5):
        X, y = _blobs(seed)
        res = kmeans(X, KMeansConfig(k=2, seed=seed))
        assert agreement(y.tolist(), res.assignments) == 1.0


# -- inertia ------------------------------------------------------------------


def test_inertia_perfect_fit_and_hand_value():
    X = np.array([[0.0, 0.0], [2.0, 0.0]])
    fit = ClusteringResult(X.copy(), np.array([0, 1]), 0.0, 0, True)
    assert inertia(X, fit) == 0.0
    one = ClusteringResult(np.array([[0.0, 2.0]]), np.array([0]), 0.0, 0, True)
    assert inertia(np.array([[0.0, 0.0]]), one) == 4.0


def test_inertia_matches_naive_loop():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(60, 7))
    C = rng.normal(size=(4, 7))
    z = rng.integers(4, size=60)
    naive = 0.0
    for i in range(60):
        for j in range(7):
            naive += (X[i, j] - C[z[i], j]) ** 2
    got = inertia(sp.csr_matrix(X), ClusteringResult(C, z, 0.0, 0, True))
    assert got == pytest.approx(naive, rel=1e-9)


def test_inertia_rejects_bad_assignment():
    with pytest.raises(ClusteringError):
        inertia(np.zeros((2, 2)), ClusteringResult(np.zeros((1, 2)), np.array([0, 1]), 0.0, 0, True))
    with pytest.raises(ClusteringError):
        inertia(np.zeros((2, 2)), ClusteringResult(np.zeros((1, 2)), np.array([0]), 0.0, 0, True))


def test_relabeling_leaves_inertia_unchanged():
    X, _ = _blobs(2)
    res = kmeans(X, KMeansConfig(k=3, seed=2))
    perm = np.array([2, 0, 1])
    relabeled = ClusteringResult(res.centroids[np.argsort(perm)], perm[res.assignments], 0.0, 0, True)
    assert inertia(X, relabeled) == pytest.approx(res.inertia, rel=1e-12)


# -- invariants on every run --------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(8, 40))
def test_trace_monotone_certificate_and_recomputed_inertia(seed, k, n):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 4))
    X[rng.random((n, 4)) < 0.4] = 0.0
    X[0] += 1.0  # at least one non-zero row
    res = kmeans(X, KMeansConfig(k=min(k, n), seed=seed, n_init=3))
    trace = np.array(res.inertia_trace)
    assert np.all(np.diff(trace) <= 1e-12 * max(1.0, trace[0]))
    assert _certificate(X, res)
    assert res.inertia == pytest.approx(inertia(X, res), rel=1e-9, abs=1e-12)
    assert res.iterations_run <= 300


def test_certificate_on_tfidf_rows():
    m, _, _, _ = planted_matrix(planted_spec(3), 4)
    for k in (2, 3, 5, 8):
        res = kmeans(m, KMeansConfig(k=k, seed=k))
        assert _certificate(m.toarray(), res)
        assert np.all(np.diff(res.inertia_trace) <= 1e-12)


def test_bit_identical_across_runs_and_threads():
    m, _, _, _ = planted_matrix(planted_spec(3), 9)
    base = kmeans(m, KMeansConfig(k=4, seed=123))
    for jobs in (1, 1, 2, 4):
        again = kmeans(m, KMeansConfig(k=4, seed=123, n_jobs=jobs))
        assert np.array_equal(again.centroids, base.centroids)
        assert np.array_equal(again.assignments, base.assignments)
        assert again.inertia == base.inertia and again.restart == base.restart


def test_ties_go_to_first_restart():
    X = np.eye(4)
    assert kmeans(X, KMeansConfig(k=4, seed=0, n_init=5)).restart == 0


def test_empty_cluster_repair_keeps_k():
    # duplicated rows make empty clusters likely after the first update
    X = np.vstack([np.tile([1.0, 0.0], (20, 1)), np.tile([0.0, 1.0], (20, 1)), [[0.7, 0.7]], [[0.9, 0.1]]])
    for seed in range(10):
        res = kmeans(X, KMeansConfig(k=4, seed=seed, n_init=1))
        assert set(res.assignments.tolist()) == {0, 1, 2, 3}


@pytest.mark.parametrize(
    "X, k, match",
    [
        (np.eye(3), 4, "exceeds"),
        (np.zeros((5, 3)), 2, "zeros"),
        (np.vstack([np.eye(2)] * 3), 3, "distinct"),
    ],
)
def test_kmeans_errors(X, k, match):
    with pytest.raises(ClusteringError, match=match):
        kmeans(X, KMeansConfig(k=k))


def test_config_validation():
    with pytest.raises(ValueError):
        KMeansConfig(k=0)
    with pytest.raises(ValueError):
        KMeansConfig(n_init=0)


def test_derive_seed_stable():
    assert derive_seed(0, 3) == derive_seed(0, 3)
    assert derive_seed(0, 3) != derive_seed(0, 4) != derive_seed(1, 3)


# -- elbow --------------------------------------------------------------------


def test_injected_sequence_picks_two():
    for _ in range(3):
        assert choose_elbow([1, 2, 3, 4], [1000, 200, 180, 170]) == (2, False)


def test_flat_curve_is_degenerate():
    assert choose_elbow([2, 3, 4, 5], [7.0] * 4) == (2, True)
    assert choose_elbow([1, 2, 3], [10.0, 5.0, 0.0]) == (1, True)  # straight line has no elbow
    assert choose_elbow([1, 2], [10.0, 1.0]) == (1, True)


def test_planted_three_themes_sweep():
    m, _, _, _ = planted_matrix(planted_spec(3), 0)
    curve = elbow_sweep(m, 1, 8, KMeansConfig(seed=0))
    assert curve.chosen_k == 3 and not curve.degenerate
    assert curve.k_values == tuple(range(1, 9))
    assert curve.chosen_k in curve.k_values
    assert set(curve.results) == set(curve.k_values)


def test_sweep_range_validation():
    X = np.eye(4)
    for lo, hi in ((0, 3), (3, 3), (2, 5)):
        with pytest.raises(ClusteringError, match="range"):
            elbow_sweep(X, lo, hi)


def test_sweep_uses_per_k_seeds():
    m, _, _, _ = planted_matrix(planted_spec(2), 1)
    curve = elbow_sweep(m, 2, 4, KMeansConfig(seed=5))
    direct = kmeans(m, KMeansConfig(k=3, seed=derive_seed(5, 3)))
    assert curve.results[3].inertia == direct.inertia


def test_violation_flagging(monkeypatch):
    import reviewfactors.cluster as cl

    fake = iter([10.0, 5.0, 6.0])

    def fake_kmeans(X, cfg):
        return ClusteringResult(np.zeros((cfg.k, X.shape[1])), np.zeros(X.shape[0], int), next(fake), 0, True)

    monkeypatch.setattr(cl, "kmeans", fake_kmeans)
    curve = cl.elbow_sweep(np.eye(4), 1, 3)
    assert curve.violations == (3,)


def test_elbow_file_round_trip(tmp_path):
    curve = ElbowCurve((2, 3, 4), (5.5, 2.25, 2.0), 3)
    write_elbow(curve, tmp_path / "e.txt")
    lines = (tmp_path / "e.txt").read_text().splitlines()
    assert lines == ["2 5.5", "3 2.25", "4 2.0", "chosen_k 3"]
    assert read_elbow(tmp_path / "e.txt") == ([2, 3, 4], [5.5, 2.25, 2.0], 3)
    assert ElbowCurve.from_dict(curve.to_dict()) == curve
