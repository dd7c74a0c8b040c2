"""Unsupervised factor extraction from polarity-split customer reviews.

Reviews are split by score into positive and negative corpora, stemmed and
cleaned, weighted with TF-IDF, clustered with k-means (cluster count from the
elbow of the inertia curve), and each cluster is summarised with LDA topics.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .cluster import ClusteringResult, ElbowCurve, KMeansConfig, elbow_sweep, kmeans
from .config import RunConfig, load_config
from .corpus import Polarity, Review, ReviewSet, corpus_stats, load_reviews, select_polarity
from .porter import stem
from .preprocess import PreprocessConfig, preprocess_pipeline, tokenize
from .report import AnalysisReport, build_report, render
from .topics import LdaConfig, cluster_topics, lda_fit
from .vectorize import build_vocabulary, tfidf

__all__ = [
    "__version__",
    "AnalysisReport",
    "ClusteringResult",
    "ElbowCurve",
    "KMeansConfig",
    "LdaConfig",
    "Polarity",
    "PreprocessConfig",
    "Review",
    "ReviewSet",
    "RunConfig",
    "build_report",
    "build_vocabulary",
    "cluster_topics",
    "corpus_stats",
    "elbow_sweep",
    "kmeans",
    "lda_fit",
    "load_config",
    "load_reviews",
    "preprocess_pipeline",
    "render",
    "select_polarity",
    "stem",
    "tfidf",
    "tokenize",
]
