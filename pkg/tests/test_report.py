from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_review
from reviewfactors.cluster import ElbowCurve
from reviewfactors.corpus import Polarity, corpus_stats
from reviewfactors.preprocess import Document, PipelineReport
from reviewfactors.report import (
    SCHEMA_VERSION,
    AnalysisReport,
    PolaritySection,
    ProvenanceError,
    build_report,
    fingerprint,
    parse_json,
    render,
    render_stats,
)
from reviewfactors.topics import ClusterTopics, Topic

POS, NEG = Polarity.POSITIVE, Polarity.NEGATIVE


def _factor(c, terms, label=None):
    topic = Topic(0, 1.0, tuple((t, 0.2) for t in terms))
    return ClusterTopics(c, 10 + c, (topic,), tuple((t, 0.1 * (5 - i)) for i, t in enumerate(terms)), label)


def _section(pol, k, before=100, after=90, hash_="h"):
    pre = PipelineReport(pol, before, after, 1, before - after, ("a", "b"), ("hotel",), 500, 400)
    elbow = ElbowCurve(tuple(range(1, 7)), (10.0, 6.0, 3.0, 2.8, 2.7, 2.65), k)
    factors = tuple(_factor(c, [f"t{c}{j}" for j in range(5)], f"Label {c}") for c in range(k))
    return PolaritySection(pol, pre, elbow, k, False, factors, hash_, 42)


STATS = corpus_stats([make_review(i, s, pos="x", nat=n) for i, (s, n) in enumerate(
    [(10, "United Kingdom"), (9, "United Kingdom"), (2, "Ireland"), (8, None)])])


def _report(**sections):
    secs = {POS: sections.get("positive"), NEG: sections.get("negative")}
    return build_report(STATS, secs, {"seed": 1, "created": None, "config": {"seed": 1}})


def test_cluster_counts_follow_k():
    r = _report(positive=_section(POS, 3), negative=_section(NEG, 5))
    assert len(r.section("positive").factors) == 3
    assert len(r.section("negative").factors) == 5


def test_single_polarity_marks_other_absent():
    r = _report(positive=_section(POS, 3))
    assert r.section(NEG) is None
    d = r.to_dict()
    assert d["polarities"]["negative"] is None
    assert r.preprocessing_counts == {"positive": (100, 90), "negative": None}
    md = render(r, "markdown")
    neg = md.split("## Factors regarding customer negative reviews")[1]
    assert "Not analysed in this run." in neg
    assert "| Negative | (absent) | (absent) |" in md


def test_json_round_trip_fixed_point():
    r = _report(positive=_section(POS, 3), negative=_section(NEG, 5))
    text = render(r, "json")
    back = parse_json(text)
    assert back == r
    assert render(back, "json") == text
    assert json.loads(text)["schema_version"] == SCHEMA_VERSION


def test_markdown_factor_table_layout():
    md = render(_report(positive=_section(POS, 3)), "markdown")
    assert "| Cluster | Topic | Term |" in md
    assert "| C1 | Label 0 | 't00', 't01', 't02', 't03', 't04' |" in md
    assert "| C3 | Label 2 |" in md


def test_markdown_before_after_table():
    md = render(_report(positive=_section(POS, 2, before=10586, after=9674), negative=_section(NEG, 2, 863, 648)), "markdown")
    assert "| Polarity | # of Before Pre-processing | # of After Pre-processing |" in md
    assert "| Positive | 10,586 | 9,674 |" in md
    assert "| Negative | 863 | 648 |" in md


def test_empty_factors_rendered_explicitly():
    sec = _section(POS, 0)
    md = render(_report(positive=sec), "markdown")
    assert "No clusters." in md


def test_stats_table_percentages_two_decimals():
    md = render(_report(), "markdown")
    assert "| 10 | 1 | 25.00% |" in md
    assert "| United Kingdom | 2 | 50.00% |" in md
    assert "Total Sample: 4" in md


def test_elbow_table_marks_choice_and_values_trace_to_fields():
    sec = _section(POS, 3)
    md = render(_report(positive=sec), "markdown")
    assert "| 3 | 3.000000 ← chosen |" in md
    for k, v in zip(sec.elbow.k_values, sec.elbow.inertias):
        assert f"| {k} | {v:.6f}" in md


def test_rendering_deterministic():
    a = _report(positive=_section(POS, 3), negative=_section(NEG, 5))
    b = _report(positive=_section(POS, 3), negative=_section(NEG, 5))
    for fmt in ("json", "markdown"):
        assert render(a, fmt).encode() == render(b, fmt).encode()


def test_mismatched_provenance_rejected():
    secs = {POS: _section(POS, 3, hash_="aaa"), NEG: None}
    with pytest.raises(ProvenanceError, match="topics"):
        build_report(STATS, secs, {}, {POS: {"clustering": "aaa", "topics": "bbb"}})
    build_report(STATS, secs, {}, {POS: {"clustering": "aaa", "topics": "aaa"}})


def test_section_under_wrong_polarity_rejected():
    with pytest.raises(ProvenanceError):
        build_report(STATS, {POS: _section(NEG, 2)}, {})


def test_count_invariants_enforced():
    with pytest.raises(ValueError, match="after"):
        _report(positive=_section(POS, 2, before=5, after=6))
    bad = _section(POS, 3)
    object.__setattr__(bad, "k_used", 4)
    with pytest.raises(ValueError, match="k=4"):
        _report(positive=bad)


def test_unknown_schema_and_format():
    d = _report().to_dict()
    d["schema_version"] = 99
    with pytest.raises(ValueError, match="schema_version"):
        AnalysisReport.from_dict(d)
    with pytest.raises(ValueError):
        render(_report(), "pdf")


def test_render_stats_formats():
    assert json.loads(render_stats(STATS, "json"))["total"] == 4
    assert render_stats(STATS).startswith("## Dataset configuration")


def test_fingerprint_sensitive_to_content_and_order():
    d1 = Document("a", POS, ("x", "y"))
    d2 = Document("b", POS, ("x",))
    assert fingerprint([d1, d2]) != fingerprint([d2, d1])
    assert fingerprint([d1]) != fingerprint([Document("a", POS, ("x y",))])
    assert fingerprint([d1]) == fingerprint([Document("a", POS, ("x", "y"))])


names = st.text(alphabet="abcdefghij '|é", min_size=1, max_size=8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.lists(names, min_size=5, max_size=5), st.integers(0, 100), st.integers(0, 100))
def test_round_trip_property(kp, kn, terms, a, b):
    pos = _section(POS, kp, before=max(a, b), after=min(a, b))
    pos = PolaritySection(POS, pos.preprocessing, pos.elbow, kp, True,
                          tuple(_factor(c, terms, None) for c in range(kp)), "x", 3)
    r = _report(positive=pos, negative=_section(NEG, kn) if kn else None)
    assert parse_json(render(r, "json")) == r
    assert r.preprocessing_counts["positive"][1] <= r.preprocessing_counts["positive"][0]
