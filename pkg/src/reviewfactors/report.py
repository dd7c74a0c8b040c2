"""Collect stage outputs into one report and render it as JSON or Markdown."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from .cluster import ElbowCurve
from .corpus import CorpusStats, Polarity
from .preprocess import Document, PipelineReport
from .topics import ClusterTopics

__all__ = [
    "SCHEMA_VERSION",
    "ProvenanceError",
    "PolaritySection",
    "AnalysisReport",
    "fingerprint",
    "build_report",
    "render",
    "render_stats",
    "parse_json",
]

SCHEMA_VERSION = 1


class ProvenanceError(ValueError):
    """Stage outputs were computed from different inputs."""


def fingerprint(docs: Sequence[Document]) -> str:
    """Content hash of a document list (ids, polarity and tokens, in order)."""
    h = hashlib.sha256()
    for d in docs:
        h.update(json.dumps([d.review_id, d.polarity.value, list(d.tokens)], ensure_ascii=False).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


@dataclass(frozen=True)
class PolaritySection:
    polarity: Polarity
    preprocessing: PipelineReport
    elbow: ElbowCurve
    k_used: int
    k_overridden: bool
    factors: tuple[ClusterTopics, ...]
    documents_hash: str = ""
    vocabulary_size: int = 0

    def to_dict(self) -> dict:
        return {
            "polarity": self.polarity.value,
            "preprocessing": self.preprocessing.to_dict(),
            "vocabulary_size": self.vocabulary_size,
            "elbow": self.elbow.to_dict(),
            "k_used": self.k_used,
            "k_overridden": self.k_overridden,
            "documents_hash": self.documents_hash,
            "factors": [f.to_dict() for f in self.factors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> PolaritySection:
        return cls(
            polarity=Polarity(d["polarity"]),
            preprocessing=PipelineReport.from_dict(d["preprocessing"]),
            elbow=ElbowCurve.from_dict(d["elbow"]),
            k_used=d["k_used"],
            k_overridden=d["k_overridden"],
            factors=tuple(ClusterTopics.from_dict(f) for f in d["factors"]),
            documents_hash=d["documents_hash"],
            vocabulary_size=d["vocabulary_size"],
        )


@dataclass(frozen=True)
class AnalysisReport:
    metadata: dict[str, Any]
    corpus_stats: CorpusStats
    sections: dict[Polarity, PolaritySection | None] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def section(self, polarity: Polarity | str) -> PolaritySection | None:
        return self.sections.get(Polarity(polarity))

    @property
    def preprocessing_counts(self) -> dict[str, tuple[int, int] | None]:
        return {
            p.value: (s.preprocessing.before, s.preprocessing.after) if s else None
            for p, s in self.sections.items()
        }

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "metadata": self.metadata,
            "corpus_stats": self.corpus_stats.to_dict(),
            "polarities": {p.value: (s.to_dict() if s else None) for p, s in self.sections.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> AnalysisReport:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {d.get('schema_version')!r}")
        return cls(
            metadata=d["metadata"],
            corpus_stats=CorpusStats.from_dict(d["corpus_stats"]),
            sections={
                Polarity(p): (PolaritySection.from_dict(s) if s is not None else None)
                for p, s in d["polarities"].items()
            },
            schema_version=d["schema_version"],
        )


def build_report(
    corpus_stats: CorpusStats,
    sections: dict[Polarity, PolaritySection | None],
    metadata: dict[str, Any],
    stage_hashes: dict[Polarity, dict[str, str]] | None = None,
) -> AnalysisReport:
    """Assemble a report and check that every stage saw the same inputs.

    Args:
        corpus_stats: dataset statistics.
        sections: one entry per polarity; ``None`` marks a polarity that was not run.
        metadata: config snapshot, seed, timestamps and input identity.
        stage_hashes: per polarity, the document hash each stage consumed
            (e.g. ``{"clustering": ..., "topics": ...}``); all must equal the
            section's ``documents_hash``.

    Raises:
        ProvenanceError: a stage hash disagrees with its section.
        ValueError: a section breaks a count invariant.
    """
    ordered = {p: sections.get(p) for p in Polarity}
    for p, s in ordered.items():
        if s is None:
            continue
        if s.polarity is not p:
            raise ProvenanceError(f"section filed under {p.value} is for {s.polarity.value}")
        if s.preprocessing.after > s.preprocessing.before:
            raise ValueError(f"{p.value}: more documents after pre-processing than before")
        if len(s.factors) != s.k_used:
            raise ValueError(f"{p.value}: {len(s.factors)} factor clusters but k={s.k_used}")
        for stage, h in (stage_hashes or {}).get(p, {}).items():
            if h != s.documents_hash:
                raise ProvenanceError(f"{p.value}: {stage} ran on different documents ({h[:12]} != {s.documents_hash[:12]})")
    return AnalysisReport(dict(metadata), corpus_stats, ordered)


# -- rendering -----------------------------------------------------------------


def _pct(p: float) -> str:
    return f"{p:.2f}%"


def _stats_md(stats: CorpusStats) -> list[str]:
    out = ["## Dataset configuration", ""]
    if stats.total == 0:
        return out + ["No reviews.", ""]
    out += ["| Score | Number | Percentage |", "|---|---:|---:|"]
    for s, (c, p) in sorted(stats.score_histogram.items(), key=lambda kv: -kv[0]):
        out.append(f"| {s} | {c:,} | {_pct(p)} |")
    out += ["", "| Nationality | Number | Percentage |", "|---|---:|---:|"]
    if stats.nationality_histogram:
        for n, (c, p) in stats.nationality_histogram.items():
            out.append(f"| {n} | {c:,} | {_pct(p)} |")
    else:
        out.append("| (not recorded) | | |")
    out += ["", f"Total Sample: {stats.total:,}", ""]
    return out


def _terms(terms) -> str:
    return ", ".join(f"'{t}'" for t, _ in terms)


def _section_md(p: Polarity, s: PolaritySection | None) -> list[str]:
    title = "positive" if p is Polarity.POSITIVE else "negative"
    out = [f"## Factors regarding customer {title} reviews", ""]
    if s is None:
        return out + ["Not analysed in this run.", ""]
    note = " (override)" if s.k_overridden else ""
    out.append(f"Clusters: {s.k_used}{note}; elbow choice: {s.elbow.chosen_k}"
               + (" (degenerate curve)" if s.elbow.degenerate else ""))
    out.append("")
    if not s.factors:
        return out + ["No clusters.", ""]
    out += ["| Cluster | Topic | Term |", "|---|---|---|"]
    for f in s.factors:
        out.append(f"| C{f.cluster_id + 1} | {f.label or ''} | {_terms(f.aggregate)} |")
    out += ["", f"### LDA topics per cluster ({title})", "", "| Cluster | LDA topic | Share | Terms |", "|---|---:|---:|---|"]
    for f in s.factors:
        for t in f.topics:
            out.append(f"| C{f.cluster_id + 1} | {t.index + 1} | {t.share:.4f} | {_terms(t.terms)} |")
    out += ["", f"### Elbow curve ({title})", "", "| k | Inertia |", "|---:|---:|"]
    for k, v in zip(s.elbow.k_values, s.elbow.inertias):
        mark = " ← chosen" if k == s.elbow.chosen_k else ""
        out.append(f"| {k} | {v:.6f}{mark} |")
    out.append("")
    return out


def _markdown(r: AnalysisReport) -> str:
    out = ["# Review factor analysis", ""]
    meta = r.metadata
    for key in ("input", "input_hash", "seed", "created"):
        if key in meta:
            out.append(f"- {key}: {meta[key]}")
    out.append("")
    out += _stats_md(r.corpus_stats)
    out += ["## Number of data sets after pre-processing", "",
            "| Polarity | # of Before Pre-processing | # of After Pre-processing |", "|---|---:|---:|"]
    for p in Polarity:
        s = r.sections.get(p)
        if s is None:
            out.append(f"| {p.value.capitalize()} | (absent) | (absent) |")
        else:
            out.append(f"| {p.value.capitalize()} | {s.preprocessing.before:,} | {s.preprocessing.after:,} |")
    out.append("")
    for p in Polarity:
        out += _section_md(p, r.sections.get(p))
    return "\n".join(out).rstrip("\n") + "\n"


def render(report: AnalysisReport, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if format in ("markdown", "md"):
        return _markdown(report)
    raise ValueError(f"unknown report format {format!r}")


def render_stats(stats: CorpusStats, format: str = "markdown") -> str:
    if format == "json":
        return json.dumps(stats.to_dict(), indent=2, ensure_ascii=False) + "\n"
    return "\n".join(_stats_md(stats)).rstrip("\n") + "\n"


def parse_json(text: str) -> AnalysisReport:
    return AnalysisReport.from_dict(json.loads(text))
