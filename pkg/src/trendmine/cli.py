"""Batch command-line driver.

Subcommands: synth, train, eval, trends, sentiment-trend, geo, topics,
report, serve.  Option precedence is CLI flag > config file (TOML, via
``--config``) > built-in default; the seed falls back to the
``TRENDMINE_SEED`` environment variable.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from datetime import date
from pathlib import Path

from . import __version__
from .config import RunConfig, build_config, load_config_file
from .errors import TrendmineError
from .nb import evaluate, load_labeled, save_model, train
from .records import TweetFormat
from .report import (
    ReportResult,
    compute_geo_calls,
    compute_mention_series,
    compute_topics,
    load_corpus,
    load_or_train_model,
    resolve_wordlists,
    run_report,
    score_against_truth,
    write_calls_csv,
    write_histogram_csv,
    write_series_csv,
    _hist_json,
    _ratio_str,
    _series_json,
    _write_json,
)
from .synth import default_scenario, generate, generate_labeled
from .trends import (
    daily_frequency,
    daily_leader,
    find_peaks,
    hashtag_histogram,
    poll_leader_agreement,
    sentiment_trend,
    source_histogram,
)

logger = logging.getLogger("trendmine")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: _Parser) -> None:
    p.add_argument("--in", dest="tweets", type=Path, help="tweet corpus file")
    p.add_argument(
        "--in-format",
        choices=[f.value for f in TweetFormat],
        help="tweet file layout (default: delimited)",
    )
    p.add_argument("--polls", type=Path, help="polls CSV")
    p.add_argument("--states", type=Path, help="state anchor CSV")
    p.add_argument("--labeled", type=Path, help="labeled training file")
    p.add_argument("--model", type=Path, help="saved classifier model JSON")
    p.add_argument("--truth", type=Path, help="scenario ground-truth JSON")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--sample-size", type=int, help="per-day sample size")
    p.add_argument("--k", type=int, help="number of topics")
    p.add_argument("--iters", type=int, help="sampler iterations")
    p.add_argument("--alpha", type=float, help="document-topic prior")
    p.add_argument("--beta", type=float, help="topic-word prior")
    p.add_argument("--lda-day", type=date.fromisoformat, help="day to topic-model")
    p.add_argument("--config", type=Path, help="TOML run configuration")
    p.add_argument("--format", choices=["csv", "json"], help="series output format")
    p.add_argument("--run-id", help="identifier recorded in the manifest")
    p.add_argument("--uniform-priors", action="store_true", default=None,
                   help="use uniform label priors instead of empirical ones")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    return build_config(
        file_values,
        tweets=args.tweets,
        tweet_format=TweetFormat(args.in_format) if args.in_format else None,
        polls=args.polls,
        states=args.states,
        labeled=args.labeled,
        model=args.model,
        truth=args.truth,
        out=args.out,
        seed=args.seed,
        sample_size=args.sample_size,
        out_format=args.format,
        run_id=args.run_id,
        uniform_priors=args.uniform_priors,
        lda_day=args.lda_day,
        lda={
            "k": args.k,
            "iterations": args.iters,
            "alpha": args.alpha,
            "beta": args.beta,
            "seed": args.seed,
        },
    )


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_synth(args) -> int:
    cfg_out = args.out or Path("synth-out")
    seed = args.seed if args.seed is not None else 0
    spec = default_scenario(seed)
    if args.start:
        spec = replace(spec, start_day=args.start)
    if args.end:
        spec = replace(spec, end_day=args.end)
    if args.daily_volume:
        spec = replace(spec, base_daily_volume=args.daily_volume)
    paths = generate(spec, cfg_out)
    labeled_path = generate_labeled(spec, args.labeled_n, Path(cfg_out) / "labeled.tsv")
    logger.info(
        "synth: wrote %s, %s, %s, %s",
        paths.tweets, paths.polls, paths.truth, labeled_path,
    )
    return 0


def _cmd_train(args) -> int:
    cfg = _config_from_args(args)
    cfg.require_inputs("labeled")
    stop, cues = resolve_wordlists(cfg)
    examples = load_labeled(cfg.labeled, stop, cues)
    model = train(examples, uniform_priors=cfg.uniform_priors)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "model.json"
    save_model(model, model_path)
    summary = {
        "meta": cfg.meta(),
        "examples": len(examples),
        "vocabulary_size": model.vocabulary_size,
        "priors": {str(int(l)): p for l, p in model.priors.items()},
    }
    _write_json(out / "train_summary.json", summary)
    logger.info("train: %d examples, |V|=%d -> %s",
                len(examples), model.vocabulary_size, model_path)
    return 0


def _cmd_eval(args) -> int:
    cfg = _config_from_args(args)
    cfg.require_inputs("labeled")
    stop, cues = resolve_wordlists(cfg)
    model = load_or_train_model(cfg) if cfg.model else None
    if model is None:
        raise TrendmineError("eval requires --model (train first)")
    held_out = load_labeled(cfg.labeled, stop, cues)
    result = evaluate(model, held_out)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "meta": cfg.meta(),
        "accuracy": result.accuracy,
        "confusion": [list(row) for row in result.confusion],
        "label_order": [-1, 0, 1],
        "total": result.total,
    }
    _write_json(out / "eval.json", payload)
    logger.info("eval: accuracy %.4f over %d examples", result.accuracy, result.total)
    return 0


def _cmd_trends(args) -> int:
    cfg = _config_from_args(args)
    corpus = load_corpus(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.meta()
    freq = daily_frequency(corpus.buckets)
    peaks = find_peaks(freq, cfg.min_prominence) if len(freq.points) >= 3 else []
    mention_series = compute_mention_series(corpus.samples, cfg)
    all_sampled = [rec for day in sorted(corpus.samples) for rec in corpus.samples[day]]
    hashtags = hashtag_histogram(all_sampled, cfg.top_n)
    sources = source_histogram(all_sampled, cfg.top_n)
    if cfg.out_format == "csv":
        write_series_csv(out / "daily_frequency.csv", freq, meta)
        for name, series in sorted(mention_series.items()):
            write_series_csv(out / f"mention_{name}.csv", series, meta)
        write_histogram_csv(out / "hashtags.csv", hashtags, meta)
        write_histogram_csv(out / "sources.csv", sources, meta)
    payload = {
        "meta": meta,
        "daily_frequency": _series_json(freq),
        "peaks": [d.isoformat() for d in peaks],
        "mention_share": {k: _series_json(s) for k, s in mention_series.items()},
        "hashtags": _hist_json(hashtags),
        "sources": _hist_json(sources),
        "dropped_records": corpus.dropped,
    }
    _write_json(out / "trends_daily.json", payload)
    logger.info("trends: wrote %s", out)
    return 0


def _cmd_sentiment_trend(args) -> int:
    cfg = _config_from_args(args)
    corpus = load_corpus(cfg)
    model = load_or_train_model(cfg)
    stop, cues = resolve_wordlists(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.meta()
    senti = sentiment_trend(corpus.samples, model, list(cfg.candidates), stop, cues)
    leaders = daily_leader(senti, list(cfg.candidates))
    polls_block = None
    if cfg.polls is not None:
        from .records import load_polls

        cfg.require_inputs("polls")
        agreement = poll_leader_agreement(load_polls(cfg.polls), leaders)
        polls_block = {
            "agreement_fraction": agreement.fraction,
            "days": [
                {
                    "day": r.day.isoformat(),
                    "poll_leader": r.poll_leader.value if r.poll_leader else "tie",
                    "twitter_leader": r.twitter_leader.value,
                    "agree": r.agree,
                }
                for r in agreement.rows
            ],
        }
    if cfg.out_format == "csv":
        for key, series in sorted(senti.items()):
            write_series_csv(out / f"{key}.csv", series, meta)
    payload = {
        "meta": meta,
        "series": {k: _series_json(s) for k, s in senti.items()},
        "daily_leader": {d.isoformat(): w.value for d, w in sorted(leaders.items())},
        "polls": polls_block,
    }
    _write_json(out / "sentiment.json", payload)
    logger.info("sentiment-trend: wrote %s", out)
    return 0


def _cmd_geo(args) -> int:
    cfg = _config_from_args(args)
    corpus = load_corpus(cfg)
    model = load_or_train_model(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.meta()
    calls, counts, extras = compute_geo_calls(cfg, corpus.records.values(), model)
    truth_score = score_against_truth(cfg, calls, extras)
    write_calls_csv(out / "geo_calls.csv", calls, counts, meta)
    payload = {
        "meta": meta,
        "calls": [
            {
                "code": c.code,
                "plus_ratio": _ratio_str(c.plus_ratio),
                "minus_ratio": _ratio_str(c.minus_ratio),
                "counts": counts.get(c.code, 0),
                "winner": c.winner.value,
            }
            for c in calls
        ],
        "offshore": extras["offshore"],
        "truth_score": truth_score,
    }
    _write_json(out / "geo_calls.json", payload)
    if truth_score:
        logger.info("geo: accuracy vs planted truth %.3f", truth_score["overall_accuracy"])
    logger.info("geo: wrote %s", out)
    return 0


def _cmd_topics(args) -> int:
    cfg = _config_from_args(args)
    corpus = load_corpus(cfg)
    report = compute_topics(cfg, corpus)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"meta": cfg.meta(), **report.to_json_dict()}
    _write_json(out / "topics.json", payload)
    logger.info("topics: wrote %s", out / "topics.json")
    return 0


def _cmd_report(args) -> int:
    cfg = _config_from_args(args)
    result: ReportResult = run_report(cfg, figures=not args.no_figures)
    print(json.dumps({"run_id": result.run_id, "out": str(result.out_dir)}))
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.run_dir, args.port)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="trendmine", description=__doc__)
    parser.add_argument("--version", action="version", version=f"trendmine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic scenario corpus")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="scenario seed")
    p.add_argument("--start", type=date.fromisoformat, help="first day")
    p.add_argument("--end", type=date.fromisoformat, help="last day")
    p.add_argument("--daily-volume", type=int, help="base records per day")
    p.add_argument("--labeled-n", type=int, default=989,
                   help="rows in the labeled training file")
    p.set_defaults(func=_cmd_synth)

    for name, func, help_text in [
        ("train", _cmd_train, "train the polarity classifier"),
        ("eval", _cmd_eval, "evaluate a model on held-out labeled data"),
        ("trends", _cmd_trends, "daily frequency, mentions, hashtag/source histograms"),
        ("sentiment-trend", _cmd_sentiment_trend, "daily polarity counts per candidate"),
        ("geo", _cmd_geo, "per-state sentiment tallies and winner calls"),
        ("topics", _cmd_topics, "topic extraction over one day's sample"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="compose every analysis into one output tree")
    _add_common(p)
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="serve a completed run directory over HTTP")
    p.add_argument("--run-dir", type=Path, required=True)
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(message)s", stream=sys.stderr, force=True
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrendmineError as e:
        print(f"trendmine: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"trendmine: i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
