"""Per-cluster LDA topics via collapsed Gibbs sampling, and factor term lists."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numba
import numpy as np
from scipy.special import gammaln

from .cluster import ClusteringResult, derive_seed
from .preprocess import Document
from .vectorize import Vocabulary, build_vocabulary, tfidf

__all__ = [
    "LdaConfig",
    "TopicModel",
    "Topic",
    "ClusterTopics",
    "lda_fit",
    "top_terms",
    "cluster_topics",
    "write_topic_dump",
]


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 5
    alpha: float | None = None  # None -> 5 / num_topics
    beta: float = 0.01
    gibbs_iterations: int = 1000
    burn_in: int = 200
    thin: int = 1
    ll_every: int = 10
    seed: int = 0
    top_n: int = 5

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0 <= self.burn_in < self.gibbs_iterations:
            raise ValueError("need 0 <= burn_in < gibbs_iterations")
        if self.thin < 1 or self.ll_every < 1:
            raise ValueError("thin and ll_every must be >= 1")

    @property
    def alpha_value(self) -> float:
        return 5.0 / self.num_topics if self.alpha is None else self.alpha


@dataclass(frozen=True)
class TopicModel:
    topic_term: np.ndarray  # num_topics x |terms|
    doc_topic: np.ndarray  # n_docs x num_topics
    terms: tuple[str, ...]
    topic_share: np.ndarray  # fraction of tokens per topic, averaged after burn-in
    log_likelihood_trace: tuple[tuple[int, float], ...] = ()

    @property
    def num_topics(self) -> int:
        return self.topic_term.shape[0]


@dataclass(frozen=True)
class Topic:
    index: int
    share: float
    terms: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class ClusterTopics:
    cluster_id: int
    size: int
    topics: tuple[Topic, ...]
    aggregate: tuple[tuple[str, float], ...]
    label: str | None = None
    reduced: bool = False

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "size": self.size,
            "label": self.label,
            "reduced": self.reduced,
            "aggregate": [[t, p] for t, p in self.aggregate],
            "topics": [
                {"index": t.index, "share": t.share, "terms": [[w, p] for w, p in t.terms]} for t in self.topics
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ClusterTopics:
        return cls(
            cluster_id=d["cluster_id"],
            size=d["size"],
            label=d["label"],
            reduced=d["reduced"],
            aggregate=tuple((t, p) for t, p in d["aggregate"]),
            topics=tuple(
                Topic(t["index"], t["share"], tuple((w, p) for w, p in t["terms"])) for t in d["topics"]
            ),
        )


@numba.njit(cache=True)
def _gibbs_sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, vbeta, u):
    K = n_k.shape[0]
    p = np.empty(K)
    for i in range(z.shape[0]):
        d = doc_of[i]
        w = word_of[i]
        t = z[i]
        n_dk[d, t] -= 1
        n_kw[t, w] -= 1
        n_k[t] -= 1
        total = 0.0
        for k in range(K):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + vbeta)
            p[k] = total
        target = u[i] * total
        t = 0
        while t < K - 1 and p[t] <= target:
            t += 1
        z[i] = t
        n_dk[d, t] += 1
        n_kw[t, w] += 1
        n_k[t] += 1


def _log_joint(n_dk, n_kw, n_k, alpha, beta) -> float:
    K, V = n_kw.shape
    D = n_dk.shape[0]
    n_d = n_dk.sum(axis=1)
    ll = K * (gammaln(V * beta) - V * gammaln(beta))
    ll += float(gammaln(n_kw + beta).sum() - gammaln(n_k + V * beta).sum())
    ll += D * (gammaln(K * alpha) - K * gammaln(alpha))
    ll += float(gammaln(n_dk + alpha).sum() - gammaln(n_d + K * alpha).sum())
    return float(ll)


def lda_fit(
    docs: Sequence[Document | Sequence[str]],
    vocab: Vocabulary | Sequence[str],
    config: LdaConfig = LdaConfig(),
    callback: Callable[[int, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> TopicModel:
    """Fit LDA by collapsed Gibbs sampling over unigram tokens.

    Each token's topic is resampled from
    ``(n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)``. Topic-term and
    document-topic estimates come from counts averaged over the post-burn-in
    sweeps (every ``thin``-th one).

    Args:
        docs: token documents. Every token must be a unigram of ``vocab``.
        vocab: vocabulary or plain term list; bigram entries are ignored.
        config: priors, iteration counts and seed.
        callback: called as ``callback(iteration, n_kw, n_dk, z)`` after every
            sweep (iteration 0 is the random initialisation). Arrays are live
            views and must not be modified.
    """
    all_terms = vocab.terms if isinstance(vocab, Vocabulary) else tuple(vocab)
    terms = tuple(t for t in all_terms if " " not in t)
    index = {t: i for i, t in enumerate(terms)}
    toks = [d.tokens if isinstance(d, Document) else d for d in docs]
    n_tok = sum(len(t) for t in toks)
    if not toks or n_tok == 0:
        raise ValueError("LDA needs at least one non-empty document")
    try:
        word_of = np.array([index[w] for doc in toks for w in doc], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"token {exc.args[0]!r} is not in the vocabulary") from None
    doc_of = np.repeat(np.arange(len(toks), dtype=np.int64), [len(t) for t in toks])

    K, V, D = config.num_topics, len(terms), len(toks)
    alpha, beta = config.alpha_value, config.beta
    rng = np.random.default_rng(config.seed)
    z = rng.integers(K, size=n_tok).astype(np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    n_k = n_kw.sum(axis=1)

    acc_kw = np.zeros((K, V))
    acc_dk = np.zeros((D, K))
    samples = 0
    trace = [(0, _log_joint(n_dk, n_kw, n_k, alpha, beta))]
    if callback is not None:
        callback(0, n_kw, n_dk, z)
    for it in range(1, config.gibbs_iterations + 1):
        _gibbs_sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, V * beta, rng.random(n_tok))
        if callback is not None:
            callback(it, n_kw, n_dk, z)
        if it % config.ll_every == 0:
            trace.append((it, _log_joint(n_dk, n_kw, n_k, alpha, beta)))
        if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
            acc_kw += n_kw
            acc_dk += n_dk
            samples += 1

    acc_kw /= samples
    acc_dk /= samples
    phi = acc_kw + beta
    phi /= phi.sum(axis=1, keepdims=True)
    theta = acc_dk + alpha
    theta /= theta.sum(axis=1, keepdims=True)
    share = acc_kw.sum(axis=1) / n_tok
    return TopicModel(phi, theta, terms, share, tuple(trace))


def _blocked(term: str, stoplist: frozenset[str]) -> bool:
    return term in stoplist or any(part in stoplist for part in term.split(" "))


def top_terms(
    model: TopicModel, topic: int, n: int = 5, adjective_stoplist: Iterable[str] = ()
) -> list[tuple[str, float]]:
    """The ``n`` most probable terms of one topic, skipping stoplisted terms.

    Skipped terms do not count toward ``n``. Ties go to the lexicographically
    smaller term.
    """
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} outside 0..{model.num_topics - 1}")
    stop = frozenset(adjective_stoplist)
    row = model.topic_term[topic]
    order = sorted(range(len(model.terms)), key=lambda i: (-row[i], model.terms[i]))
    out = [(model.terms[i], float(row[i])) for i in order if not _blocked(model.terms[i], stop)]
    if len(out) < n:
        raise ValueError(f"only {len(out)} non-stoplisted terms available, {n} requested")
    return out[:n]


def _aggregate_terms(
    model: TopicModel,
    cluster_docs: Sequence[Document],
    vocab: Vocabulary | None,
    stop: frozenset[str],
    n: int,
) -> tuple[tuple[str, float], ...]:
    # unigrams: topic mixture sum_k share_k * phi_k(w); bigrams: share of the cluster's summed TF-IDF mass
    scores: dict[str, float] = dict(zip(model.terms, (model.topic_share @ model.topic_term).tolist()))
    if vocab is not None and len(vocab) and any(" " in t for t in vocab.terms):
        mass = np.asarray(tfidf(cluster_docs, vocab).matrix.sum(axis=0)).ravel()
        total = mass.sum()
        if total > 0:
            for i, t in enumerate(vocab.terms):
                if " " in t and mass[i] > 0:
                    scores[t] = float(mass[i] / total)
    ranked = sorted((kv for kv in scores.items() if not _blocked(kv[0], stop)), key=lambda kv: (-kv[1], kv[0]))
    return tuple(ranked[:n])


def cluster_topics(
    clustering: ClusteringResult,
    docs: Sequence[Document],
    vocab: Vocabulary | None,
    config: LdaConfig = LdaConfig(),
    stoplist: Iterable[str] = (),
    labels: dict[int, str] | None = None,
) -> list[ClusterTopics]:
    """Fit one LDA model per cluster and collect its factor terms.

    The LDA vocabulary is every unigram present in the cluster. ``vocab`` (the
    TF-IDF vocabulary) only contributes bigram candidates to the aggregate list.
    Clusters with fewer documents than ``num_topics`` get one topic per
    document and are flagged ``reduced``.
    """
    z = np.asarray(clustering.assignments)
    if z.shape[0] != len(docs):
        raise ValueError("clustering does not cover the documents")
    stop = frozenset(stoplist)
    labels = labels or {}
    out = []
    for c in range(clustering.k):
        members = [docs[i] for i in np.flatnonzero(z == c)]
        if not members:
            out.append(ClusterTopics(c, 0, (), (), labels.get(c), True))
            continue
        k = min(config.num_topics, len(members))
        cfg = replace(config, num_topics=k, seed=derive_seed(config.seed, c))
        uni = build_vocabulary(members, ngram_max=1, min_df=1)
        model = lda_fit(members, uni, cfg)
        topics = []
        for t in range(k):
            avail = sum(1 for term in model.terms if not _blocked(term, stop))
            topics.append(Topic(t, float(model.topic_share[t]), tuple(top_terms(model, t, min(config.top_n, avail), stop))))
        agg = _aggregate_terms(model, members, vocab, stop, config.top_n)
        out.append(ClusterTopics(c, len(members), tuple(topics), agg, labels.get(c), k < config.num_topics))
    return out


def write_topic_dump(clusters: Sequence[ClusterTopics], path: str | Path) -> None:
    """Plain-text dump: per cluster, per topic, ``term probability`` lines."""
    lines = []
    for ct in clusters:
        head = f"# cluster {ct.cluster_id} size {ct.size}"
        if ct.label:
            head += f" label {ct.label}"
        lines.append(head)
        for t in ct.topics:
            lines.append(f"## topic {t.index} share {t.share!r}")
            lines.extend(f"{w} {p!r}" for w, p in t.terms)
        lines.append("## aggregate")
        lines.extend(f"{w} {p!r}" for w, p in ct.aggregate)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
