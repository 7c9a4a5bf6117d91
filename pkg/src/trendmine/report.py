"""End-to-end report composition.

Runs ingestion, bucketing, sampling, sentiment, trends, geo calls, and
topics over one corpus, then writes:

* per-series CSVs (``day,value``) and histogram CSVs (``key,count,share``),
  each with a leading provenance comment;
* JSON artifacts consumed by the HTTP facade (``trends_daily.json``,
  ``sentiment.json``, ``geo_calls.json``, ``topics.json``);
* PNG figures rendered from the computed series;
* one composed ``report.json`` and a ``manifest.json`` listing every file
  with its checksum.

All outputs embed (version, seed, config hash) and contain no wall-clock
values, so identical inputs and configuration reproduce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

from .config import RunConfig
from .errors import NoOverlap, ValidationError
from .geo import (
    OFFSHORE,
    StateCall,
    Winner,
    aggregate_state_sentiment,
    build_kdtree,
    call_state,
    default_states,
    load_states,
    score_predictions,
)
from .lda import LdaConfig, TopicReport
from .lda import run as lda_run
from .nb import NBModel, load_labeled, load_model, train
from .records import (
    DailyBucket,
    TimeWindow,
    TweetRecord,
    bucket_by_day,
    iter_tweets,
    load_polls,
    sample_daily,
)
from .synth import load_truth
from .textprep import load_wordlist, preprocess, validate_candidates
from .trends import (
    Histogram,
    TrendSeries,
    daily_frequency,
    daily_leader,
    find_peaks,
    hashtag_histogram,
    mention_share,
    poll_leader_agreement,
    sentiment_trend,
    source_histogram,
)

logger = logging.getLogger("trendmine")


@dataclass
class ReportResult:
    out_dir: Path
    run_id: str
    report_path: Path
    manifest_path: Path


def _meta_comment(meta: Mapping) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in sorted(meta.items()))


def write_series_csv(path: Path, series: TrendSeries, meta: Mapping) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_meta_comment(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["day", "value"])
        for day, value in series.points:
            writer.writerow([day.isoformat(), f"{value:g}"])
    return path


def write_histogram_csv(path: Path, histogram: Histogram, meta: Mapping) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_meta_comment(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["key", "count", "share"])
        for b in histogram.bins:
            writer.writerow([b.key, b.count, f"{b.share:.4f}"])
    return path


def _ratio_str(value: float | None) -> str:
    if value is None:
        return "NA"
    if math.isinf(value):
        return "inf"
    return f"{value:.6f}"


def write_calls_csv(
    path: Path, calls: Sequence[StateCall], counts: Mapping[str, int], meta: Mapping
) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_meta_comment(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["code", "plus_ratio", "minus_ratio", "counts", "winner"])
        for call in calls:
            writer.writerow(
                [
                    call.code,
                    _ratio_str(call.plus_ratio),
                    _ratio_str(call.minus_ratio),
                    counts.get(call.code, 0),
                    call.winner.value,
                ]
            )
    return path


def _write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _series_json(series: TrendSeries) -> dict:
    return {
        "label": series.label,
        "points": [[d.isoformat(), v] for d, v in series.points],
    }


def _hist_json(histogram: Histogram) -> list[dict]:
    return [
        {"key": b.key, "count": b.count, "share": b.share} for b in histogram.bins
    ]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# Pipeline pieces shared by the CLI subcommands.


@dataclass
class CorpusView:
    """Loaded corpus with day buckets and per-day samples."""

    records: dict[str, TweetRecord]
    buckets: list[DailyBucket]
    dropped: int
    window: TimeWindow
    samples: dict[date, list[TweetRecord]]


def load_corpus(cfg: RunConfig) -> CorpusView:
    cfg.require_inputs("tweets")
    records: dict[str, TweetRecord] = {}
    for rec in iter_tweets(cfg.tweets, cfg.tweet_format):
        records[rec.id] = rec
    if not records:
        raise ValidationError(f"corpus {cfg.tweets} contains no records")
    window = cfg.window
    if window is None:
        offset = -480 * 60
        shifted = [r.timestamp + offset for r in records.values()]
        window = TimeWindow(start=min(shifted), end=max(shifted) + 1)
    buckets, dropped = bucket_by_day(records.values(), window)
    samples: dict[date, list[TweetRecord]] = {}
    for bucket in buckets:
        ids = sample_daily(bucket, cfg.sample_size, cfg.seed)
        samples[bucket.day] = [records[i] for i in ids]
    logger.info(
        "corpus: %d records, %d days, %d dropped outside window",
        len(records),
        len(buckets),
        dropped,
    )
    return CorpusView(records, buckets, dropped, window, samples)


def load_or_train_model(cfg: RunConfig) -> NBModel:
    stop, cues = resolve_wordlists(cfg)
    if cfg.model is not None:
        cfg.require_inputs("model")
        model = load_model(cfg.model)
        logger.info("model: loaded %s (|V|=%d)", cfg.model, model.vocabulary_size)
        return model
    cfg.require_inputs("labeled")
    examples = load_labeled(cfg.labeled, stop, cues)
    model = train(examples, uniform_priors=cfg.uniform_priors)
    logger.info(
        "model: trained on %d examples (|V|=%d)", len(examples), model.vocabulary_size
    )
    return model


def resolve_wordlists(cfg: RunConfig):
    stop = load_wordlist(cfg.stopwords_path) if cfg.stopwords_path else None
    cues = load_wordlist(cfg.cues_path) if cfg.cues_path else None
    return stop, cues


def resolve_states(cfg: RunConfig):
    if cfg.states is not None:
        cfg.require_inputs("states")
        return load_states(cfg.states)
    return default_states()


def compute_geo_calls(
    cfg: RunConfig, records, model: NBModel
) -> tuple[list[StateCall], dict[str, int], dict]:
    """Aggregate geo-tagged records and call every state in the anchor file;
    states without records get zero tallies (undecided)."""
    stop, cues = resolve_wordlists(cfg)
    points = resolve_states(cfg)
    tree = build_kdtree(points)
    tallies = aggregate_state_sentiment(
        records,
        model,
        tree,
        list(cfg.candidates),
        stop,
        cues,
        haversine=cfg.haversine,
        offshore_threshold_degrees=cfg.offshore_threshold_degrees,
    )
    calls = []
    counts = {}
    for p in sorted(points, key=lambda p: p.code):
        tally = tallies.get(p.code)
        if tally is None:
            from .geo import StateTally

            tally = StateTally(p.code)
        calls.append(call_state(tally))
        counts[p.code] = tally.total_geo
    extras = {
        "offshore": tallies[OFFSHORE].total_geo if OFFSHORE in tallies else 0,
        "electoral_votes": {p.code: p.electoral_votes for p in points},
    }
    return calls, counts, extras


def score_against_truth(cfg: RunConfig, calls: Sequence[StateCall], extras: dict):
    if cfg.truth is None:
        return None
    cfg.require_inputs("truth")
    truth = load_truth(cfg.truth)
    planted = {
        code: Winner(info["winner"])
        for code, info in truth.get("states", {}).items()
        if info["winner"] in ("A", "B")
    }
    if not planted:
        return None
    subset = {c.code: c for c in calls if c.code in planted}
    report = score_predictions(subset, planted, extras["electoral_votes"])
    return {
        "overall_accuracy": report.overall_accuracy,
        "correct": report.correct,
        "total": report.total,
        "per_candidate": {
            w.value: acc for w, acc in report.per_candidate.items()
        },
        "electoral": {w.value: v for w, v in report.electoral.items()},
    }


# ---------------------------------------------------------------------------
# Full report.


def compute_mention_series(
    samples: Mapping[date, Sequence[TweetRecord]], cfg: RunConfig
) -> dict[str, TrendSeries]:
    days = sorted(samples)
    per_name: dict[str, list[tuple[date, float]]] = {c.name: [] for c in cfg.candidates}
    for day in days:
        sample = samples[day]
        if sample:
            shares = mention_share(sample, list(cfg.candidates))
        else:
            shares = {c.name: 0.0 for c in cfg.candidates}
        for name, value in shares.items():
            per_name[name].append((day, value))
    return {
        name: TrendSeries(f"mention_{name}", tuple(points))
        for name, points in per_name.items()
    }


def compute_topics(cfg: RunConfig, corpus: CorpusView) -> TopicReport:
    """Run the topic model over one day's sampled documents: the configured
    day, or the busiest day when none is given."""
    stop, cues = resolve_wordlists(cfg)
    if cfg.lda_day is not None:
        if cfg.lda_day not in corpus.samples:
            raise ValidationError(f"lda day {cfg.lda_day} has no sampled records")
        day = cfg.lda_day
    else:
        day = max(corpus.samples, key=lambda d: (len(corpus.samples[d]), d))
    docs = [preprocess(rec.text, stop, cues) for rec in corpus.samples[day]]
    logger.info("topics: %d docs from %s, k=%d", len(docs), day, cfg.lda.k)
    _, report = lda_run(docs, cfg.lda)
    return report


def run_report(cfg: RunConfig, figures: bool = True) -> ReportResult:
    validate_candidates(list(cfg.candidates))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.meta()
    stop, cues = resolve_wordlists(cfg)

    corpus = load_corpus(cfg)
    model = load_or_train_model(cfg)

    logger.info("trends: daily frequency, peaks, mentions, histograms")
    freq = daily_frequency(corpus.buckets)
    peaks = find_peaks(freq, cfg.min_prominence)
    mention_series = compute_mention_series(corpus.samples, cfg)
    all_sampled = [rec for day in sorted(corpus.samples) for rec in corpus.samples[day]]
    hashtags = hashtag_histogram(all_sampled, cfg.top_n)
    sources = source_histogram(all_sampled, cfg.top_n)
    peak_hashtags = {
        day.isoformat(): _hist_json(hashtag_histogram(corpus.samples[day], cfg.top_n))
        for day in peaks
        if day in corpus.samples
    }

    logger.info("sentiment: classifying daily samples")
    senti = sentiment_trend(corpus.samples, model, list(cfg.candidates), stop, cues)
    leaders = daily_leader(senti, list(cfg.candidates))

    polls_block = None
    poll_favor_series: dict[str, TrendSeries] = {}
    if cfg.polls is not None:
        cfg.require_inputs("polls")
        polls = load_polls(cfg.polls)
        logger.info("polls: %d records", len(polls))
        by_day: dict[date, list] = {}
        for p in polls:
            by_day.setdefault(p.end_date, []).append(p)
        if by_day:
            favor_a = tuple(
                (d, sum(p.favor_a for p in ps) / len(ps))
                for d, ps in sorted(by_day.items())
            )
            favor_b = tuple(
                (d, sum(p.favor_b for p in ps) / len(ps))
                for d, ps in sorted(by_day.items())
            )
            poll_favor_series = {
                "poll_favor_a": TrendSeries("poll_favor_a", favor_a),
                "poll_favor_b": TrendSeries("poll_favor_b", favor_b),
            }
        try:
            agreement = poll_leader_agreement(polls, leaders)
            polls_block = {
                "agreement_fraction": agreement.fraction,
                "days": [
                    {
                        "day": row.day.isoformat(),
                        "poll_leader": row.poll_leader.value if row.poll_leader else "tie",
                        "twitter_leader": row.twitter_leader.value,
                        "agree": row.agree,
                    }
                    for row in agreement.rows
                ],
            }
        except NoOverlap as e:
            polls_block = {"agreement_fraction": None, "days": [], "note": str(e)}

    logger.info("geo: aggregating geo-tagged records")
    calls, geo_counts, extras = compute_geo_calls(cfg, corpus.records.values(), model)
    truth_score = score_against_truth(cfg, calls, extras)

    topics = compute_topics(cfg, corpus)

    # --- write artifacts -------------------------------------------------
    logger.info("write: artifacts under %s", out)
    series_dir = out / "series"
    write_series_csv(series_dir / "daily_frequency.csv", freq, meta)
    for name, series in sorted(mention_series.items()):
        write_series_csv(series_dir / f"mention_{name}.csv", series, meta)
    for key, series in sorted(senti.items()):
        write_series_csv(series_dir / f"{key}.csv", series, meta)
    for key, series in sorted(poll_favor_series.items()):
        write_series_csv(series_dir / f"{key}.csv", series, meta)
    write_histogram_csv(out / "hashtags.csv", hashtags, meta)
    write_histogram_csv(out / "sources.csv", sources, meta)
    write_calls_csv(out / "geo_calls.csv", calls, geo_counts, meta)

    trends_payload = {
        "meta": meta,
        "daily_frequency": _series_json(freq),
        "peaks": [d.isoformat() for d in peaks],
        "mention_share": {k: _series_json(s) for k, s in mention_series.items()},
        "hashtags": _hist_json(hashtags),
        "hashtags_on_peak_days": peak_hashtags,
        "sources": _hist_json(sources),
        "dropped_records": corpus.dropped,
        "window": {
            "start": corpus.window.start,
            "end": corpus.window.end,
            "day_offset_minutes": corpus.window.day_offset_minutes,
        },
    }
    _write_json(out / "trends_daily.json", trends_payload)

    sentiment_payload = {
        "meta": meta,
        "series": {k: _series_json(s) for k, s in senti.items()},
        "daily_leader": {d.isoformat(): w.value for d, w in sorted(leaders.items())},
        "polls": polls_block,
    }
    _write_json(out / "sentiment.json", sentiment_payload)

    geo_payload = {
        "meta": meta,
        "calls": [
            {
                "code": c.code,
                "plus_ratio": _ratio_str(c.plus_ratio),
                "minus_ratio": _ratio_str(c.minus_ratio),
                "counts": geo_counts.get(c.code, 0),
                "winner": c.winner.value,
            }
            for c in calls
        ],
        "offshore": extras["offshore"],
        "truth_score": truth_score,
    }
    _write_json(out / "geo_calls.json", geo_payload)

    topics_payload = {"meta": meta, **topics.to_json_dict()}
    _write_json(out / "topics.json", topics_payload)

    report_payload = {
        "meta": meta,
        "run_id": cfg.resolved_run_id(),
        "trends": trends_payload,
        "sentiment": sentiment_payload,
        "geo": geo_payload,
        "topics": topics_payload,
    }
    _write_json(out / "report.json", report_payload)

    if figures:
        logger.info("figures: rendering")
        from . import figures as fig

        fig_dir = out / "figures"
        fig.plot_series(
            [freq], fig_dir / "daily_frequency.png", meta,
            "daily volume", peaks=peaks,
        )
        fig.plot_series(
            sorted(mention_series.values(), key=lambda s: s.label),
            fig_dir / "mention_share.png", meta,
            "candidate mention share", ylabel="share (%)",
        )
        pos = [s for k, s in sorted(senti.items()) if k.startswith("pos_")]
        neg = [s for k, s in sorted(senti.items()) if k.startswith("neg_")]
        fig.plot_series(pos, fig_dir / "sentiment_positive.png", meta,
                        "positive tweets per day")
        fig.plot_series(neg, fig_dir / "sentiment_negative.png", meta,
                        "negative tweets per day")
        if hashtags.bins:
            fig.plot_histogram(hashtags, fig_dir / "hashtags.png", meta,
                               "top hashtags")
        if sources.bins:
            fig.plot_histogram(sources, fig_dir / "sources.png", meta,
                               "tweet sources")
        fig.plot_topics(topics, fig_dir / "topics.png", meta)
        if poll_favor_series:
            fig.plot_poll_agreement(poll_favor_series, fig_dir / "polls.png", meta)

    run_id = cfg.resolved_run_id()
    manifest_path = write_manifest(out, run_id, cfg, corpus.window)
    logger.info("done: run %s", run_id)
    return ReportResult(out, run_id, out / "report.json", manifest_path)


def write_manifest(out: Path, run_id: str, cfg: RunConfig, window: TimeWindow) -> Path:
    """Checksum every artifact; the manifest's timestamps are the corpus
    window bounds rather than wall-clock time, keeping runs byte-identical."""
    files = {}
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            files[path.relative_to(out).as_posix()] = _sha256(path)
    manifest = {
        "run_id": run_id,
        "meta": cfg.meta(),
        "window": {
            "start": window.start,
            "end": window.end,
            "day_offset_minutes": window.day_offset_minutes,
        },
        "files": files,
    }
    return _write_json(out / "manifest.json", manifest)
