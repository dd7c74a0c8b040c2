"""End-to-end orchestration: select, preprocess, vectorize, cluster, topics, report."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from . import __version__
from .cluster import ClusteringResult, ElbowCurve, KMeansConfig, derive_seed, elbow_sweep, kmeans, write_elbow
from .config import RunConfig
from .corpus import Polarity, PolarityCorpus, ReviewSet, corpus_stats, load_reviews, select_polarity
from .preprocess import (
    Document,
    PipelineReport,
    PreprocessConfig,
    StopwordList,
    default_adjective_stoplist,
    default_base_stopwords,
    load_wordlist,
    normalize_terms,
    preprocess_pipeline,
)
from .report import AnalysisReport, PolaritySection, build_report, fingerprint, render
from .topics import ClusterTopics, LdaConfig, cluster_topics, write_topic_dump
from .vectorize import TfIdfMatrix, Vocabulary, build_vocabulary, dump_matrix, tfidf

__all__ = ["StageError", "PolarityRun", "load_input", "run_polarity", "analyze", "write_outputs", "created_stamp"]

log = logging.getLogger(__name__)

_POL_INDEX = {Polarity.POSITIVE: 0, Polarity.NEGATIVE: 1}


class StageError(RuntimeError):
    def __init__(self, stage: str, polarity: Polarity | None, cause: BaseException, partial: Any = None):
        where = f"{polarity.value} " if polarity else ""
        super().__init__(f"{where}stage '{stage}' failed: {cause}")
        self.stage = stage
        self.polarity = polarity
        self.cause = cause
        self.partial = partial


@dataclass
class PolarityRun:
    """Everything one polarity pipeline produced, filled in stage by stage."""

    polarity: Polarity
    corpus: PolarityCorpus | None = None
    docs: list[Document] = field(default_factory=list)
    stopwords: StopwordList | None = None
    preprocessing: PipelineReport | None = None
    vocabulary: Vocabulary | None = None
    matrix: TfIdfMatrix | None = None
    elbow: ElbowCurve | None = None
    clustering: ClusteringResult | None = None
    k_used: int = 0
    k_overridden: bool = False
    topics: list[ClusterTopics] = field(default_factory=list)
    hashes: dict[str, str] = field(default_factory=dict)

    def section(self) -> PolaritySection:
        return PolaritySection(
            polarity=self.polarity,
            preprocessing=self.preprocessing,
            elbow=self.elbow,
            k_used=self.k_used,
            k_overridden=self.k_overridden,
            factors=tuple(self.topics),
            documents_hash=self.hashes.get("preprocess", ""),
            vocabulary_size=len(self.vocabulary) if self.vocabulary is not None else 0,
        )


def created_stamp() -> str | None:
    """UTC timestamp from ``SOURCE_DATE_EPOCH``; ``None`` keeps outputs reproducible."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def load_input(cfg: RunConfig) -> ReviewSet:
    return load_reviews(cfg.resolve("input"), cfg.input_format)


def _wordlists(cfg: RunConfig) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    base = normalize_terms(load_wordlist(cfg.resolve("base_stopwords"))) if cfg.base_stopwords else default_base_stopwords()
    marks = set(cfg.curated_marks)
    if cfg.curated_stopwords:
        marks.update(load_wordlist(cfg.resolve("curated_stopwords")))
    adjectives = (
        frozenset(load_wordlist(cfg.resolve("adjective_stoplist"))) if cfg.adjective_stoplist else default_adjective_stoplist()
    )
    return base, frozenset(marks), adjectives


def run_polarity(reviews: ReviewSet, polarity: Polarity | str, cfg: RunConfig, through: str = "topics") -> PolarityRun:
    """Run one polarity through the stages, stopping after ``through`` ("elbow" or "topics")."""
    polarity = Polarity(polarity)
    run = PolarityRun(polarity)
    pi = _POL_INDEX[polarity]
    stage = "wordlists"
    try:
        base, marks, adjectives = _wordlists(cfg)

        stage = "select"
        run.corpus = select_polarity(reviews, polarity, cfg.positive_scores, cfg.negative_scores)

        stage = "preprocess"
        pcfg = PreprocessConfig(base, marks, cfg.stopword_top_n, cfg.min_tokens)
        run.docs, run.stopwords, run.preprocessing = preprocess_pipeline(run.corpus, pcfg)
        run.hashes["preprocess"] = fingerprint(run.docs)
        if not run.docs:
            raise ValueError("no documents survived pre-processing")

        stage = "vectorize"
        run.vocabulary = build_vocabulary(run.docs, cfg.ngram_max, cfg.min_df)
        run.matrix = tfidf(run.docs, run.vocabulary)
        run.hashes["vectorize"] = fingerprint(run.docs)

        stage = "elbow"
        base_km = KMeansConfig(
            k=1, max_iter=cfg.max_iter, tol=cfg.tol, n_init=cfg.n_init,
            seed=derive_seed(cfg.seed, 1, pi), n_jobs=cfg.n_jobs,
        )
        k_max = min(cfg.k_max, run.matrix.n_docs)
        if k_max < cfg.k_max:
            log.warning("%s: only %d documents, sweeping k up to %d", polarity.value, run.matrix.n_docs, k_max)
        run.elbow = elbow_sweep(run.matrix, cfg.k_min, k_max, base_km)
        if through == "elbow":
            return run

        stage = "kmeans"
        override = cfg.override_k.get(polarity.value)
        run.k_used = override or run.elbow.chosen_k
        run.k_overridden = override is not None
        if run.k_used in run.elbow.results:
            run.clustering = run.elbow.results[run.k_used]
        else:
            run.clustering = kmeans(run.matrix, replace(base_km, k=run.k_used, seed=derive_seed(base_km.seed, run.k_used)))
        run.hashes["clustering"] = fingerprint(run.docs)

        stage = "topics"
        lcfg = LdaConfig(
            num_topics=cfg.num_topics, alpha=cfg.alpha, beta=cfg.beta, gibbs_iterations=cfg.gibbs_iterations,
            burn_in=cfg.burn_in, seed=derive_seed(cfg.seed, 2, pi), top_n=cfg.top_terms,
        )
        labels = {c - 1: name for c, name in cfg.labels.get(polarity.value, {}).items()}
        run.topics = cluster_topics(run.clustering, run.docs, run.vocabulary, lcfg, adjectives, labels)
        run.hashes["topics"] = fingerprint(run.docs)
    except StageError:
        raise
    except Exception as exc:  # noqa: BLE001 - re-raised with stage context
        raise StageError(stage, polarity, exc, run) from exc
    return run


def analyze(
    cfg: RunConfig, reviews: ReviewSet | None = None, through: str = "topics"
) -> tuple[AnalysisReport | None, dict[Polarity, PolarityRun]]:
    """Run every configured polarity; build the report unless stopping at the elbow."""
    if reviews is None:
        try:
            reviews = load_input(cfg)
        except Exception as exc:  # noqa: BLE001
            raise StageError("load", None, exc) from exc
    stats = corpus_stats(reviews)
    runs: dict[Polarity, PolarityRun] = {}
    for name in cfg.polarities:
        pol = Polarity(name)
        runs[pol] = run_polarity(reviews, pol, cfg, through)
    if through != "topics":
        return None, runs
    metadata = {
        "tool": "reviewfactors",
        "version": __version__,
        "input": cfg.input,
        "input_hash": reviews.content_hash(),
        "skipped_records": reviews.skip_count,
        "seed": cfg.seed,
        "created": created_stamp(),
        "config": cfg.snapshot(),
    }
    sections = {p: (runs[p].section() if p in runs else None) for p in Polarity}
    hashes = {p: {k: v for k, v in r.hashes.items() if k != "preprocess"} for p, r in runs.items()}
    return build_report(stats, sections, metadata, hashes), runs


def write_outputs(
    out_dir: str | Path,
    runs: dict[Polarity, PolarityRun],
    report: AnalysisReport | None = None,
    dump_matrices: bool = False,
    include_preprocessing: bool = False,
) -> list[Path]:
    """Write whatever the runs hold; returns the written paths in write order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, text: str) -> None:
        p = out / name
        p.write_text(text, encoding="utf-8", newline="\n")
        written.append(p)

    if report is not None:
        emit("report.json", render(report, "json"))
        emit("report.md", render(report, "markdown"))
    for pol, run in runs.items():
        tag = pol.value
        if include_preprocessing and run.preprocessing is not None:
            emit(f"preprocess_{tag}.json", json.dumps(run.preprocessing.to_dict(), indent=2) + "\n")
        if run.elbow is not None:
            write_elbow(run.elbow, out / f"elbow_{tag}.txt")
            written.append(out / f"elbow_{tag}.txt")
        if run.topics:
            write_topic_dump(run.topics, out / f"topics_{tag}.txt")
            written.append(out / f"topics_{tag}.txt")
        if dump_matrices and run.matrix is not None:
            dump_matrix(run.matrix, out / f"tfidf_{tag}.txt", out / f"vocab_{tag}.tsv")
            written += [out / f"tfidf_{tag}.txt", out / f"vocab_{tag}.tsv"]
    return written
