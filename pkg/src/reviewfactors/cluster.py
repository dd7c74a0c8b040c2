"""Lloyd k-means on TF-IDF rows and elbow-based choice of the cluster count."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .vectorize import TfIdfMatrix

__all__ = [
    "KMeansConfig",
    "ClusteringResult",
    "ElbowCurve",
    "ClusteringError",
    "kmeans",
    "inertia",
    "squared_distances",
    "elbow_sweep",
    "choose_elbow",
    "derive_seed",
    "write_elbow",
    "read_elbow",
]

log = logging.getLogger(__name__)

_CHUNK = 512


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 10
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")


@dataclass(frozen=True)
class ClusteringResult:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations_run: int
    converged: bool
    inertia_trace: tuple[float, ...] = ()
    restart: int = 0

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster)


@dataclass(frozen=True)
class ElbowCurve:
    k_values: tuple[int, ...]
    inertias: tuple[float, ...]
    chosen_k: int
    degenerate: bool = False
    violations: tuple[int, ...] = ()
    results: dict[int, ClusteringResult] = field(default_factory=dict, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {
            "k_values": list(self.k_values),
            "inertias": list(self.inertias),
            "chosen_k": self.chosen_k,
            "degenerate": self.degenerate,
            "violations": list(self.violations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ElbowCurve:
        return cls(
            tuple(d["k_values"]), tuple(d["inertias"]), d["chosen_k"], d["degenerate"], tuple(d["violations"])
        )


def _as_csr(matrix: TfIdfMatrix | sp.spmatrix | np.ndarray) -> sp.csr_matrix:
    if isinstance(matrix, TfIdfMatrix):
        matrix = matrix.matrix
    return sp.csr_matrix(matrix, dtype=float)


def squared_distances(X: sp.csr_matrix, centroids: np.ndarray) -> np.ndarray:
    """Exact ``||x_i - c_j||^2`` by explicit differences, in row chunks."""
    X = _as_csr(X)
    out = np.empty((X.shape[0], centroids.shape[0]))
    for start in range(0, X.shape[0], _CHUNK):
        block = X[start : start + _CHUNK].toarray()
        diff = block[:, None, :] - centroids[None, :, :]
        out[start : start + _CHUNK] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def inertia(matrix: TfIdfMatrix | sp.spmatrix | np.ndarray, result: ClusteringResult) -> float:
    """Sum of squared distances from each row to its assigned centroid."""
    X = _as_csr(matrix)
    z = np.asarray(result.assignments)
    k = result.centroids.shape[0]
    if z.shape[0] != X.shape[0]:
        raise ClusteringError("assignments do not cover every row")
    if z.size and (z.min() < 0 or z.max() >= k):
        raise ClusteringError(f"assignment references a centroid outside 0..{k - 1}")
    total = 0.0
    for start in range(0, X.shape[0], _CHUNK):
        block = X[start : start + _CHUNK].toarray()
        diff = block - result.centroids[z[start : start + _CHUNK]]
        total += float(np.einsum("ij,ij->", diff, diff))
    return total


def _distinct_rows(X: sp.csr_matrix) -> np.ndarray:
    seen: dict[bytes, int] = {}
    for i in range(X.shape[0]):
        s, e = X.indptr[i], X.indptr[i + 1]
        key = X.indices[s:e].tobytes() + b"|" + X.data[s:e].tobytes()
        seen.setdefault(key, i)
    return np.array(sorted(seen.values()), dtype=np.int64)


def _means(X: sp.csr_matrix, z: np.ndarray, k: int) -> np.ndarray:
    counts = np.bincount(z, minlength=k).astype(float)
    M = sp.csr_matrix((1.0 / counts[z], (z, np.arange(z.size))), shape=(k, z.size))
    return np.asarray((M @ X).toarray())


class _Lloyd:
    """One restart of Lloyd's algorithm; keeps the per-iteration inertia trace."""

    def __init__(self, X: sp.csr_matrix, x2: np.ndarray, k: int, max_iter: int, tol: float):
        self.X, self.x2, self.k, self.max_iter, self.tol = X, x2, k, max_iter, tol

    def _assign(self, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cross = np.asarray(self.X @ C.T)
        D = self.x2[:, None] - 2.0 * cross + np.einsum("ij,ij->i", C, C)[None, :]
        np.maximum(D, 0.0, out=D)
        z = np.argmin(D, axis=1)
        d = D[np.arange(z.size), z]
        counts = np.bincount(z, minlength=self.k)
        for j in np.flatnonzero(counts == 0):
            # move the worst-fitting point (from a cluster that can spare it) into the empty one
            spare = counts[z] > 1
            cand = np.flatnonzero(spare)
            p = cand[np.argmax(d[cand])]
            counts[z[p]] -= 1
            counts[j] += 1
            z[p] = j
            d[p] = 0.0
            C[j] = self.X[p].toarray().ravel()
        return z, d

    def run(self, C: np.ndarray) -> ClusteringResult:
        C = C.copy()
        trace: list[float] = []
        z_prev = None
        shift = np.inf
        converged = False
        it = 0
        for it in range(self.max_iter + 1):
            z, d = self._assign(C)
            trace.append(float(d.sum()))
            if (z_prev is not None and np.array_equal(z, z_prev)) or shift <= self.tol:
                converged = True
                break
            if it == self.max_iter:
                break
            C_new = _means(self.X, z, self.k)
            shift = float(np.sqrt(np.max(np.einsum("ij,ij->i", C_new - C, C_new - C))))
            C, z_prev = C_new, z
        # last step was an assignment against C, so the nearest-centroid property holds
        D = squared_distances(self.X, C)
        z_exact = np.argmin(D, axis=1)
        z = np.where(D[np.arange(z.size), z_exact] < D[np.arange(z.size), z], z_exact, z)
        res = ClusteringResult(C, z, 0.0, it, converged, tuple(trace))
        return replace(res, inertia=inertia(self.X, res))


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a (seed, key...) path; stable across platforms."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint32)[0])


def kmeans(matrix: TfIdfMatrix | sp.spmatrix | np.ndarray, config: KMeansConfig) -> ClusteringResult:
    """Best of ``n_init`` Lloyd runs from random distinct data rows.

    Restarts may run on ``n_jobs`` threads; each restart draws from its own
    seed so the result does not depend on the thread count.
    """
    X = _as_csr(matrix)
    n = X.shape[0]
    if config.k > n:
        raise ClusteringError(f"k={config.k} exceeds the number of documents ({n})")
    if X.nnz == 0 or not np.any(X.data):
        raise ClusteringError("matrix is all zeros")
    distinct = _distinct_rows(X)
    if distinct.size < config.k:
        raise ClusteringError(f"only {distinct.size} distinct rows for k={config.k}")

    x2 = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    lloyd = _Lloyd(X, x2, config.k, config.max_iter, config.tol)

    def one(r: int) -> ClusteringResult:
        rng = np.random.default_rng(derive_seed(config.seed, r))
        idx = rng.choice(distinct, size=config.k, replace=False)
        return replace(lloyd.run(X[idx].toarray()), restart=r)

    if config.n_jobs > 1 and config.n_init > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            runs = list(pool.map(one, range(config.n_init)))
    else:
        runs = [one(r) for r in range(config.n_init)]
    best = runs[0]
    for r in runs[1:]:
        if r.inertia < best.inertia:
            best = r
    return best


def choose_elbow(k_values: Sequence[int], inertias: Sequence[float]) -> tuple[int, bool]:
    """Pick k where the decrease in inertia breaks most sharply.

    Uses the largest discrete second difference
    ``I(k-1) - 2 I(k) + I(k+1)`` over interior k. A flat curve, or one with no
    positive second difference, is degenerate and yields the smallest k.
    """
    ks = list(k_values)
    y = np.asarray(inertias, dtype=float)
    scale = max(1.0, float(np.max(np.abs(y)))) if y.size else 1.0
    if len(ks) < 3 or float(np.ptp(y)) <= 1e-12 * scale:
        return ks[0], True
    second = y[:-2] - 2.0 * y[1:-1] + y[2:]
    best = int(np.argmax(second))
    if second[best] <= 1e-12 * scale:
        return ks[0], True
    return ks[best + 1], False


def elbow_sweep(
    matrix: TfIdfMatrix | sp.spmatrix | np.ndarray, k_min: int, k_max: int, base_config: KMeansConfig = KMeansConfig()
) -> ElbowCurve:
    """Run k-means for every k in ``k_min..k_max`` and choose k at the elbow."""
    X = _as_csr(matrix)
    if not (1 <= k_min < k_max <= X.shape[0]):
        raise ClusteringError(f"invalid k range {k_min}..{k_max} for {X.shape[0]} documents")
    ks = tuple(range(k_min, k_max + 1))
    results = {}
    for k in ks:
        cfg = replace(base_config, k=k, seed=derive_seed(base_config.seed, k))
        results[k] = kmeans(X, cfg)
    inertias = tuple(results[k].inertia for k in ks)
    chosen, degenerate = choose_elbow(ks, inertias)
    violations = tuple(
        ks[i] for i in range(1, len(ks)) if inertias[i] > inertias[i - 1] * 1.01 + 1e-12
    )
    if violations:
        log.warning("inertia rose by more than 1%% at k=%s", violations)
    return ElbowCurve(ks, inertias, chosen, degenerate, violations, results)


def write_elbow(curve: ElbowCurve, path: str | Path) -> None:
    """Two-column ``k inertia`` text followed by a ``chosen_k`` line."""
    lines = [f"{k} {float(v)!r}" for k, v in zip(curve.k_values, curve.inertias)]
    lines.append(f"chosen_k {curve.chosen_k}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_elbow(path: str | Path) -> tuple[list[int], list[float], int]:
    ks, ys, chosen = [], [], None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        a, b = line.split()
        if a == "chosen_k":
            chosen = int(b)
        else:
            ks.append(int(a))
            ys.append(float(b))
    return ks, ys, chosen
