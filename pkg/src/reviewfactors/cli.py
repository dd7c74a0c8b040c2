"""Command line entry point: ``reviewfactors {stats,elbow,analyze,synth}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .config import ConfigError, RunConfig, load_config
from .corpus import ReviewLoadError, corpus_stats, dump_reviews, generate_synthetic, load_reviews
from .fixtures import hotel_spec, planted_spec
from .pipeline import StageError, analyze, write_outputs
from .report import render_stats

__all__ = ["main", "build_parser"]

log = logging.getLogger("reviewfactors")


def _override_k(text: str) -> dict[str, int]:
    """``4`` applies to every configured polarity; ``positive=4`` to one."""
    pol, sep, value = text.rpartition("=")
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --override-k value {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError("--override-k must be >= 1")
    if not sep:
        return {"*": k}
    if pol not in ("positive", "negative"):
        raise argparse.ArgumentTypeError(f"bad polarity in --override-k {text!r}")
    return {pol: k}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--input", help="review file (overrides the config)")
    common.add_argument("--seed", type=int, help="root random seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("json", "markdown"), default="markdown", help="stdout rendering")
    common.add_argument("--polarity", choices=("positive", "negative", "both"))
    common.add_argument("--override-k", type=_override_k, action="append", metavar="[POLARITY=]K",
                        help="fix the cluster count instead of using the elbow choice")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="reviewfactors", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("stats", parents=[common], help="score and nationality tables of the input")
    sub.add_parser("elbow", parents=[common], help="write k-inertia curves per polarity")
    an = sub.add_parser("analyze", parents=[common], help="full pipeline, writes report and dumps")
    an.add_argument("--dump-matrices", action="store_true", help="also write TF-IDF triplets and vocabularies")
    sy = sub.add_parser("synth", parents=[common], help="generate a synthetic review fixture")
    sy.add_argument("--preset", choices=("hotel", "planted"), default="hotel")
    sy.add_argument("--themes", type=int, default=3, help="theme count for the planted preset")
    sy.add_argument("--n-reviews", type=int)
    sy.add_argument("--data-format", choices=("jsonl", "csv"), default="jsonl")
    sy.add_argument("--truth", action="store_true", help="also write the id -> theme map")
    return parser


def _config(args: argparse.Namespace, require_input: bool = True) -> RunConfig:
    # command-line paths are relative to the working directory, not the config file
    path = str(Path(args.input).resolve()) if args.input is not None else None
    out = str(Path(args.out).resolve()) if args.out is not None else None
    cfg = load_config(args.config, input=path, seed=args.seed, output=out, polarity=args.polarity)
    if args.override_k:
        merged = dict(cfg.override_k)
        for chunk in args.override_k:
            for pol, k in chunk.items():
                merged.update({p: k for p in cfg.polarities} if pol == "*" else {pol: k})
        cfg = replace(cfg, override_k=merged)
    return cfg.validate(require_input)


def _quarantine(cfg: RunConfig, err: StageError) -> Path:
    qdir = cfg.resolve("output") / "quarantine"
    runs = {err.polarity: err.partial} if err.polarity is not None and err.partial is not None else {}
    write_outputs(qdir, runs, include_preprocessing=True)
    (qdir / "error.txt").write_text(f"stage: {err.stage}\ncause: {err.cause!r}\n", encoding="utf-8")
    return qdir


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _config(args)
    reviews = load_reviews(cfg.resolve("input"), cfg.input_format)
    sys.stdout.write(render_stats(corpus_stats(reviews), args.format))
    return 0


def cmd_elbow(args: argparse.Namespace) -> int:
    cfg = _config(args)
    _, runs = analyze(cfg, through="elbow")
    write_outputs(cfg.resolve("output"), runs)
    for pol, run in runs.items():
        print(f"{pol.value}: chosen_k {run.elbow.chosen_k}" + (" (degenerate)" if run.elbow.degenerate else ""))
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _config(args)
    report, runs = analyze(cfg)
    for p in write_outputs(cfg.resolve("output"), runs, report, dump_matrices=args.dump_matrices):
        log.info("wrote %s", p)
    for pol, run in runs.items():
        print(f"{pol.value}: {run.preprocessing.after} documents, k={run.k_used}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _config(args, require_input=False)
    if args.preset == "hotel":
        spec = hotel_spec(args.n_reviews or 1200)
    else:
        spec = planted_spec(args.themes, args.n_reviews or 300)
    reviews, truth = generate_synthetic(spec, cfg.seed)
    out = cfg.resolve("output")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.preset}_reviews.{args.data_format}"
    dump_reviews(reviews, path, args.data_format)
    print(path)
    if args.truth:
        tpath = out / f"{args.preset}_truth.json"
        tpath.write_text(json.dumps(truth, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        print(tpath)
    return 0


_COMMANDS = {"stats": cmd_stats, "elbow": cmd_elbow, "analyze": cmd_analyze, "synth": cmd_synth}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except StageError as err:
        print(f"error: {err}", file=sys.stderr)
        if args.command in ("analyze", "elbow"):
            try:
                cfg = _config(args)
                print(f"partial outputs in {_quarantine(cfg, err)}", file=sys.stderr)
            except Exception as exc:  # noqa: BLE001 - reporting only
                log.warning("could not write quarantine outputs: %s", exc)
        return 3
    except (ConfigError, ReviewLoadError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
