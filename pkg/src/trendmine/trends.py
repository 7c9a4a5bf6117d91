"""Temporal distributions: daily volume, peaks, mentions, histograms, polls.

All operations are pure per-day computations and deterministic given their
inputs.  Nothing here renders plots; series and histograms export to CSV
(``day,value`` / ``key,count,share``) through the report layer.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass
from datetime import date, timedelta
from typing import AbstractSet, Iterable, Mapping, Sequence

from .errors import EmptySample, NoOverlap, SeriesTooShort, ValidationError
from .geo import Winner
from .nb import NBModel, SentimentLabel, classify_candidate
from .records import DailyBucket, PollRecord, TweetRecord
from .textprep import CandidateSpec, detect_mentions, extract_hashtags


@dataclass(frozen=True)
class TrendSeries:
    """Per-day numeric series with strictly increasing days."""

    label: str
    points: tuple[tuple[date, float], ...]

    def __post_init__(self):
        days = [d for d, _ in self.points]
        if any(b <= a for a, b in zip(days, days[1:])):
            raise ValidationError(f"series {self.label!r} days must strictly increase")

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def days(self) -> list[date]:
        return [d for d, _ in self.points]


@dataclass(frozen=True)
class HistogramBin:
    key: str
    count: int
    share: float


@dataclass(frozen=True)
class Histogram:
    bins: tuple[HistogramBin, ...]


def _histogram(counts: Counter, top_n: int | None, total: int) -> Histogram:
    ordered = sorted(counts.items(), key=lambda kc: (-kc[1], kc[0]))
    if top_n is not None:
        ordered = ordered[:top_n]
    return Histogram(
        tuple(
            HistogramBin(key, count, 100.0 * count / total)
            for key, count in ordered
        )
    )


def daily_frequency(buckets: Sequence[DailyBucket]) -> TrendSeries:
    """Bucket size per day; days missing between the first and last bucket
    are emitted with value 0."""
    sizes = {b.day: len(b.tweet_ids) for b in sorted(buckets, key=lambda b: b.day)}
    if not sizes:
        return TrendSeries("daily_frequency", ())
    points = []
    day, last = min(sizes), max(sizes)
    while day <= last:
        points.append((day, float(sizes.get(day, 0))))
        day += timedelta(days=1)
    return TrendSeries("daily_frequency", tuple(points))


def find_peaks(series: TrendSeries, min_prominence: float = 1.5) -> list[date]:
    """Days that stand out from the series.

    An interior day is a peak when it strictly exceeds its left neighbor,
    is at least its right neighbor, and its value is at least
    ``min_prominence`` times the series median.  An endpoint qualifies only
    as the global maximum, and must strictly exceed its single neighbor.
    """
    vals = series.values()
    if len(vals) < 3:
        raise SeriesTooShort(f"need at least 3 points, got {len(vals)}")
    med = statistics.median(vals)
    gmax = max(vals)

    def prominent(v: float) -> bool:
        return v >= min_prominence * med if med > 0 else v > 0

    peaks = []
    last = len(vals) - 1
    for i, (day, v) in enumerate(series.points):
        if i == 0:
            is_peak = v == gmax and v > vals[1]
        elif i == last:
            is_peak = v == gmax and v > vals[last - 1]
        else:
            is_peak = v > vals[i - 1] and v >= vals[i + 1]
        if is_peak and prominent(v):
            peaks.append(day)
    return peaks


def mention_share(
    day_sample: Sequence[TweetRecord], candidates: Sequence[CandidateSpec]
) -> dict[str, float]:
    """Percent of the sample mentioning each candidate; a record that
    mentions several counts once for each of them."""
    if not day_sample:
        raise EmptySample("mention share needs a non-empty sample")
    counts = {c.name: 0 for c in candidates}
    for rec in day_sample:
        for name in detect_mentions(rec.text, candidates):
            counts[name] += 1
    return {name: 100.0 * n / len(day_sample) for name, n in counts.items()}


def hashtag_histogram(
    day_sample: Sequence[TweetRecord], top_n: int | None = None
) -> Histogram:
    """Counts of lowercased hashtags in raw text (cleaning would delete
    them); shares are percent of all hashtag occurrences."""
    counts: Counter = Counter()
    for rec in day_sample:
        counts.update(extract_hashtags(rec.text))
    if not counts:
        return Histogram(())
    return _histogram(counts, top_n, total=sum(counts.values()))


def source_histogram(
    day_sample: Sequence[TweetRecord], top_n: int | None = None
) -> Histogram:
    """Counts over the client ``source`` field; shares are percent of the
    sample."""
    if not day_sample:
        return Histogram(())
    counts = Counter(rec.source for rec in day_sample)
    return _histogram(counts, top_n, total=len(day_sample))


def sentiment_trend(
    daily_samples: Mapping[date, Sequence[TweetRecord]],
    model: NBModel,
    candidates: Sequence[CandidateSpec],
    stopwords: AbstractSet[str] | None = None,
    cues: AbstractSet[str] | None = None,
) -> dict[str, TrendSeries]:
    """Positive and negative counts per candidate per day.

    Returns four series keyed ``pos_<name>`` / ``neg_<name>``; neutral and
    multi-candidate records count toward nothing.
    """
    if len(candidates) != 2:
        raise ValidationError("exactly two candidates are required")
    days = sorted(daily_samples)
    keys = [f"{kind}_{c.name}" for c in candidates for kind in ("pos", "neg")]
    counts: dict[str, dict[date, int]] = {k: {d: 0 for d in days} for k in keys}
    for day in days:
        for rec in daily_samples[day]:
            result = classify_candidate(model, rec, candidates, stopwords, cues)
            if result is None:
                continue
            name, label = result
            if label is SentimentLabel.POSITIVE:
                counts[f"pos_{name}"][day] += 1
            elif label is SentimentLabel.NEGATIVE:
                counts[f"neg_{name}"][day] += 1
    return {
        key: TrendSeries(key, tuple((d, float(counts[key][d])) for d in days))
        for key in keys
    }


def daily_leader(
    sentiment: Mapping[str, TrendSeries], candidates: Sequence[CandidateSpec]
) -> dict[date, Winner]:
    """Candidate with the larger positive count per day (A is the first
    candidate); days with equal counts are omitted."""
    pos_a = dict(sentiment[f"pos_{candidates[0].name}"].points)
    pos_b = dict(sentiment[f"pos_{candidates[1].name}"].points)
    leaders: dict[date, Winner] = {}
    for day in sorted(set(pos_a) & set(pos_b)):
        if pos_a[day] > pos_b[day]:
            leaders[day] = Winner.A
        elif pos_b[day] > pos_a[day]:
            leaders[day] = Winner.B
    return leaders


@dataclass(frozen=True)
class PollAgreementRow:
    day: date
    poll_leader: Winner | None  # None marks a tie day, excluded from scoring
    twitter_leader: Winner
    agree: bool | None


@dataclass(frozen=True)
class PollAgreement:
    fraction: float
    rows: tuple[PollAgreementRow, ...]


def poll_leader_agreement(
    polls: Iterable[PollRecord], twitter_leader: Mapping[date, Winner]
) -> PollAgreement:
    """Fraction of overlapping days on which the poll average and the
    sentiment series point at the same leader.

    Polls are aggregated by end date with same-day averaging; tie days are
    excluded from the denominator.  Raises :class:`NoOverlap` when no
    scorable day exists.
    """
    by_day: dict[date, list[PollRecord]] = {}
    for p in polls:
        by_day.setdefault(p.end_date, []).append(p)
    overlap = sorted(set(by_day) & set(twitter_leader))
    if not overlap:
        raise NoOverlap("poll and sentiment dates do not overlap")
    rows = []
    agree_count = 0
    denom = 0
    for day in overlap:
        day_polls = by_day[day]
        fa = sum(p.favor_a for p in day_polls) / len(day_polls)
        fb = sum(p.favor_b for p in day_polls) / len(day_polls)
        if fa == fb:
            rows.append(PollAgreementRow(day, None, twitter_leader[day], None))
            continue
        leader = Winner.A if fa > fb else Winner.B
        agree = leader is twitter_leader[day]
        rows.append(PollAgreementRow(day, leader, twitter_leader[day], agree))
        denom += 1
        agree_count += agree
    if denom == 0:
        raise NoOverlap("every overlapping day is a poll tie")
    return PollAgreement(agree_count / denom, tuple(rows))
