"""Run configuration: one YAML file with nested sections, overridable from the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

__all__ = ["RunConfig", "ConfigError", "load_config"]


class ConfigError(ValueError):
    pass


# section -> {yaml key: RunConfig attribute}
_SECTIONS: dict[str, dict[str, str]] = {
    "input": {"path": "input", "format": "input_format"},
    "selection": {"positive_scores": "positive_scores", "negative_scores": "negative_scores"},
    "preprocess": {
        "base_stopwords": "base_stopwords",
        "curated_stopwords": "curated_stopwords",
        "curated_marks": "curated_marks",
        "top_n": "stopword_top_n",
        "min_tokens": "min_tokens",
    },
    "vectorize": {"ngram_max": "ngram_max", "min_df": "min_df"},
    "cluster": {
        "k_min": "k_min",
        "k_max": "k_max",
        "max_iter": "max_iter",
        "tol": "tol",
        "n_init": "n_init",
        "n_jobs": "n_jobs",
        "override_k": "override_k",
    },
    "topics": {
        "num_topics": "num_topics",
        "alpha": "alpha",
        "beta": "beta",
        "iterations": "gibbs_iterations",
        "burn_in": "burn_in",
        "top_n": "top_terms",
        "adjective_stoplist": "adjective_stoplist",
    },
}
_TOP = {"seed": "seed", "output": "output", "polarity": "polarity", "labels": "labels"}
_PATHS = ("input", "base_stopwords", "curated_stopwords", "adjective_stoplist")  # files checked by validate


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    input_format: str | None = None
    positive_scores: tuple[int, ...] = (7, 8, 9)
    negative_scores: tuple[int, ...] = (1, 2, 3)
    base_stopwords: str | None = None
    curated_stopwords: str | None = None
    curated_marks: tuple[str, ...] = ()
    stopword_top_n: int = 30
    min_tokens: int = 3
    ngram_max: int = 2
    min_df: int = 2
    k_min: int = 1
    k_max: int = 10
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 10
    n_jobs: int = 1
    override_k: dict[str, int] = field(default_factory=dict)
    num_topics: int = 5
    alpha: float | None = None
    beta: float = 0.01
    gibbs_iterations: int = 1000
    burn_in: int = 200
    top_terms: int = 5
    adjective_stoplist: str | None = None
    labels: dict[str, dict[int, str]] = field(default_factory=dict)
    seed: int = 0
    output: str = "out"
    polarity: str = "both"
    base_dir: str = "."

    def resolve(self, attr: str) -> Path | None:
        value = getattr(self, attr)
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def polarities(self) -> tuple[str, ...]:
        return ("positive", "negative") if self.polarity == "both" else (self.polarity,)

    def validate(self, require_input: bool = True) -> RunConfig:
        """Check ranges and file references before any work starts."""
        pos, neg = set(self.positive_scores), set(self.negative_scores)
        if pos & neg:
            raise ConfigError(f"positive and negative score sets overlap: {sorted(pos & neg)}")
        if not pos <= set(range(1, 11)) or not neg <= set(range(1, 11)):
            raise ConfigError("scores must lie in 1..10")
        if self.polarity not in ("positive", "negative", "both"):
            raise ConfigError(f"polarity must be positive, negative or both, not {self.polarity!r}")
        if self.input_format not in (None, "jsonl", "csv"):
            raise ConfigError(f"unknown input format {self.input_format!r}")
        checks = [
            (self.min_tokens >= 1, "min_tokens must be >= 1"),
            (self.stopword_top_n >= 0, "preprocess.top_n must be >= 0"),
            (self.ngram_max >= 1, "ngram_max must be >= 1"),
            (self.min_df >= 1, "min_df must be >= 1"),
            (1 <= self.k_min < self.k_max, "need 1 <= k_min < k_max"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.tol >= 0, "tol must be >= 0"),
            (self.n_init >= 1, "n_init must be >= 1"),
            (self.n_jobs >= 1, "n_jobs must be >= 1"),
            (self.num_topics >= 1, "num_topics must be >= 1"),
            (self.alpha is None or self.alpha > 0, "alpha must be > 0"),
            (self.beta > 0, "beta must be > 0"),
            (0 <= self.burn_in < self.gibbs_iterations, "need 0 <= burn_in < iterations"),
            (self.top_terms >= 1, "topics.top_n must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        for pol, k in self.override_k.items():
            if pol not in ("positive", "negative") or not isinstance(k, int) or k < 1:
                raise ConfigError(f"bad override_k entry {pol}: {k!r}")
        if require_input and self.input is None:
            raise ConfigError("no input file configured")
        for attr in _PATHS:
            p = self.resolve(attr)
            if p is not None and (attr != "input" or require_input) and not p.is_file():
                raise ConfigError(f"{attr} file not found: {p}")
        return self

    def snapshot(self) -> dict[str, Any]:
        """Config as nested sections; the output directory is left out so reports do not depend on it."""
        flat = asdict(self)
        out: dict[str, Any] = {}
        for section, keys in _SECTIONS.items():
            out[section] = {k: _plain(flat[a]) for k, a in keys.items()}
        for k, a in _TOP.items():
            if k != "output":
                out[k] = _plain(flat[a])
        return out


def _plain(v: Any) -> Any:
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def _from_mapping(data: dict[str, Any], base_dir: str) -> RunConfig:
    kwargs: dict[str, Any] = {"base_dir": base_dir}
    known = {f.name for f in fields(RunConfig)}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a mapping")
            for k, v in value.items():
                if k not in _SECTIONS[key]:
                    raise ConfigError(f"unknown key {key}.{k}")
                kwargs[_SECTIONS[key][k]] = v
        elif key in _TOP:
            kwargs[_TOP[key]] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    for attr in ("positive_scores", "negative_scores", "curated_marks"):
        if attr in kwargs:
            kwargs[attr] = tuple(kwargs[attr])
    if "override_k" in kwargs:
        kwargs["override_k"] = {k: v for k, v in (kwargs["override_k"] or {}).items() if v is not None}
    if "labels" in kwargs:
        kwargs["labels"] = {p: {int(c): str(n) for c, n in (m or {}).items()} for p, m in (kwargs["labels"] or {}).items()}
    assert set(kwargs) <= known
    return RunConfig(**kwargs)


def load_config(path: str | Path | None = None, **overrides: Any) -> RunConfig:
    """Read a YAML config (or start from defaults) and apply non-None overrides."""
    if path is not None:
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        cfg = _from_mapping(data, str(path.parent))
    else:
        cfg = RunConfig()
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **changes)
