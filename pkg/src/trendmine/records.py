"""Flat-file corpus I/O: tweet records, day bucketing, sampling, and polls.

Records are line-oriented.  Two tweet layouts are supported:

* delimited: ``id<TAB>timestamp<TAB>source<TAB>author<TAB>lat<TAB>lon<TAB>text``
  with a literal ``\\N`` for an absent coordinate;
* jsonl: one object per line with keys ``id, ts, source, author, lat, lon, text``.

Polls are CSV with header ``pollster,end_date,population,method,favor_a,favor_b``.

Day bucketing applies a fixed minute offset (default -480, i.e. PST) before
flooring to a calendar day; no timezone database is consulted and DST is
ignored.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CoordinateOutOfRange,
    EmptyText,
    MalformedRecord,
    ValidationError,
)

_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()
_SECONDS_PER_DAY = 86400

#: Identifier of the seeded generator used for all sampling, recorded in
#: run metadata so outputs are reproducible across installs.
RNG_ALGORITHM = "pcg64"


class TweetFormat(Enum):
    DELIMITED = "delimited"
    JSONL = "jsonl"


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float


@dataclass(frozen=True)
class TweetRecord:
    """One timestamped short text, the unit of all downstream analysis."""

    id: str
    timestamp: int
    source: str
    author: str
    text: str
    geo: GeoPoint | None = None


@dataclass(frozen=True)
class TimeWindow:
    """Half-open epoch-second window with a day-bucketing minute offset."""

    start: int
    end: int
    day_offset_minutes: int = -480

    def __post_init__(self):
        if self.start >= self.end:
            raise ValidationError(
                f"window start {self.start} must precede end {self.end}"
            )


@dataclass
class DailyBucket:
    """Ids of the records whose shifted timestamp falls on one calendar day.

    Ids keep file order; uniqueness follows from unique record ids.
    """

    day: date
    tweet_ids: list[str] = field(default_factory=list)


class Population(Enum):
    LIKELY_VOTERS = "LikelyVoters"
    REGISTERED_VOTERS = "RegisteredVoters"
    OTHER = "Other"


class PollMethod(Enum):
    AUTOMATED_PHONE = "AutomatedPhone"
    PHONE = "Phone"
    INTERNET = "Internet"
    MIXED = "Mixed"


@dataclass(frozen=True)
class PollRecord:
    pollster: str
    end_date: date
    population: Population
    method: PollMethod
    favor_a: float
    favor_b: float


# ---------------------------------------------------------------------------
# Tweet parsing / serialization


def _check_coordinate(lat: float, lon: float, line_no: int | None) -> None:
    if not (-90.0 <= lat <= 90.0):
        raise CoordinateOutOfRange(f"latitude {lat} outside [-90, 90]", line_no)
    if not (-180.0 <= lon <= 180.0):
        raise CoordinateOutOfRange(f"longitude {lon} outside [-180, 180]", line_no)


def _build_record(
    id_: str,
    ts: int,
    source: str,
    author: str,
    lat: float | None,
    lon: float | None,
    text: str,
    line_no: int | None,
) -> TweetRecord:
    if not id_:
        raise MalformedRecord("empty record id", line_no)
    if ts < 0:
        raise MalformedRecord(f"negative timestamp {ts}", line_no)
    if not text.strip():
        raise EmptyText("record text empty after trimming", line_no)
    geo = None
    if lat is not None and lon is not None:
        _check_coordinate(lat, lon, line_no)
        geo = GeoPoint(lat, lon)
    return TweetRecord(id_, ts, source, author, text, geo)


def parse_tweet_record(
    line: str,
    fmt: TweetFormat = TweetFormat.DELIMITED,
    line_no: int | None = None,
) -> TweetRecord:
    """Parse one line into a :class:`TweetRecord`.

    Geo is omitted when either coordinate is missing; an out-of-range
    coordinate raises :class:`CoordinateOutOfRange`.
    """
    line = line.rstrip("\n")
    if fmt is TweetFormat.DELIMITED:
        parts = line.split("\t", 6)
        if len(parts) != 7:
            raise MalformedRecord(
                f"expected 7 tab-separated fields, got {len(parts)}", line_no
            )
        id_, ts_s, source, author, lat_s, lon_s, text = parts
        try:
            ts = int(ts_s)
        except ValueError:
            raise MalformedRecord(f"bad timestamp {ts_s!r}", line_no) from None
        lat = lon = None
        if lat_s != r"\N" and lon_s != r"\N":
            try:
                lat, lon = float(lat_s), float(lon_s)
            except ValueError:
                raise MalformedRecord(
                    f"bad coordinates {lat_s!r}, {lon_s!r}", line_no
                ) from None
        return _build_record(id_, ts, source, author, lat, lon, text, line_no)

    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"bad JSON: {e.msg}", line_no) from None
    if not isinstance(obj, dict):
        raise MalformedRecord("JSON line is not an object", line_no)
    try:
        id_, ts, source, author, text = (
            obj["id"],
            obj["ts"],
            obj["source"],
            obj["author"],
            obj["text"],
        )
    except KeyError as e:
        raise MalformedRecord(f"missing key {e.args[0]!r}", line_no) from None
    if not isinstance(id_, str) or not isinstance(ts, int) or isinstance(ts, bool):
        raise MalformedRecord("id must be string and ts an integer", line_no)
    if not all(isinstance(v, str) for v in (source, author, text)):
        raise MalformedRecord("source/author/text must be strings", line_no)
    lat, lon = obj.get("lat"), obj.get("lon")
    if not (isinstance(lat, (int, float)) and isinstance(lon, (int, float))):
        lat = lon = None
    return _build_record(id_, ts, source, author, lat, lon, text, line_no)


def serialize_tweet_record(rec: TweetRecord, fmt: TweetFormat = TweetFormat.DELIMITED) -> str:
    """Inverse of :func:`parse_tweet_record`; returns one line without newline."""
    if "\n" in rec.text:
        raise MalformedRecord("text may not contain newlines in line-oriented files")
    if fmt is TweetFormat.DELIMITED:
        if any("\t" in f for f in (rec.id, rec.source, rec.author)):
            raise MalformedRecord("tabs allowed only in the trailing text field")
        lat = repr(rec.geo.lat) if rec.geo else r"\N"
        lon = repr(rec.geo.lon) if rec.geo else r"\N"
        return "\t".join(
            (rec.id, str(rec.timestamp), rec.source, rec.author, lat, lon, rec.text)
        )
    obj = {
        "id": rec.id,
        "ts": rec.timestamp,
        "source": rec.source,
        "author": rec.author,
        "lat": rec.geo.lat if rec.geo else None,
        "lon": rec.geo.lon if rec.geo else None,
        "text": rec.text,
    }
    return json.dumps(obj, ensure_ascii=False)


def iter_tweets(path: str | Path, fmt: TweetFormat = TweetFormat.DELIMITED) -> Iterator[TweetRecord]:
    """Stream records from a file, raising on the first malformed line."""
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield parse_tweet_record(line, fmt, line_no=i)


def load_tweets(path: str | Path, fmt: TweetFormat = TweetFormat.DELIMITED) -> list[TweetRecord]:
    return list(iter_tweets(path, fmt))


def write_tweets(
    path: str | Path,
    records: Iterable[TweetRecord],
    fmt: TweetFormat = TweetFormat.DELIMITED,
) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(serialize_tweet_record(rec, fmt))
            fh.write("\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# Day bucketing and sampling


def day_of_timestamp(timestamp: int, day_offset_minutes: int = -480) -> date:
    """Calendar day of an epoch timestamp after applying the minute offset."""
    shifted = timestamp + day_offset_minutes * 60
    return date.fromordinal(_EPOCH_ORDINAL + shifted // _SECONDS_PER_DAY)


def bucket_by_day(
    records: Iterable[TweetRecord], window: TimeWindow
) -> tuple[list[DailyBucket], int]:
    """Partition records into per-day buckets sorted ascending by day.

    A record is kept iff its offset-shifted timestamp lies in
    ``[window.start, window.end)``; the second return value counts dropped
    records, so bucket sizes plus dropped equals the input count.
    """
    offset = window.day_offset_minutes * 60
    by_day: dict[date, list[str]] = {}
    dropped = 0
    for rec in records:
        shifted = rec.timestamp + offset
        if not (window.start <= shifted < window.end):
            dropped += 1
            continue
        day = date.fromordinal(_EPOCH_ORDINAL + shifted // _SECONDS_PER_DAY)
        by_day.setdefault(day, []).append(rec.id)
    buckets = [DailyBucket(day, ids) for day, ids in sorted(by_day.items())]
    return buckets, dropped


def sample_daily(bucket: DailyBucket, n: int, seed: int) -> list[str]:
    """Uniform sample without replacement of ``min(n, |bucket|)`` ids.

    Membership depends only on the id set, the day, ``n``, and ``seed``
    (ids are canonicalized by sorting before drawing); the output order of a
    proper subsample is defined by the generator.  When ``n`` covers the
    whole bucket the ids are returned unpermuted in bucket order.
    """
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    if n >= len(bucket.tweet_ids):
        return list(bucket.tweet_ids)
    ids = sorted(bucket.tweet_ids)
    rng = np.random.default_rng([seed % 2**63, bucket.day.toordinal()])
    picked = rng.choice(len(ids), size=n, replace=False)
    return [ids[i] for i in picked]


# ---------------------------------------------------------------------------
# Polls

_POLL_HEADER = ["pollster", "end_date", "population", "method", "favor_a", "favor_b"]


def _parse_enum(cls, raw: str, line_no: int):
    key = raw.replace(" ", "").replace("_", "").replace("-", "").casefold()
    for member in cls:
        if member.value.casefold() == key:
            return member
    raise MalformedRecord(f"unknown {cls.__name__} value {raw!r}", line_no)


def load_polls(path: str | Path) -> list[PollRecord]:
    """Load a polls CSV, sorted ascending by end date.

    Raises :class:`MalformedRecord` with the line number for any bad row;
    an empty file yields an empty list.
    """
    polls: list[PollRecord] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if [h.strip() for h in header] != _POLL_HEADER:
            raise MalformedRecord(
                f"expected header {','.join(_POLL_HEADER)!r}", line_no=1
            )
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise MalformedRecord(f"expected 6 fields, got {len(row)}", i)
            pollster, date_s, pop_s, method_s, fa_s, fb_s = row
            try:
                end = date.fromisoformat(date_s)
            except ValueError:
                raise MalformedRecord(f"bad date {date_s!r}", i) from None
            try:
                fa, fb = float(fa_s), float(fb_s)
            except ValueError:
                raise MalformedRecord(f"bad percentages {fa_s!r}, {fb_s!r}", i) from None
            if not (0.0 <= fa <= 100.0 and 0.0 <= fb <= 100.0):
                raise MalformedRecord("favor percentages must lie in [0, 100]", i)
            if fa + fb > 100.0:
                raise MalformedRecord(f"favor_a + favor_b = {fa + fb} exceeds 100", i)
            polls.append(
                PollRecord(
                    pollster,
                    end,
                    _parse_enum(Population, pop_s, i),
                    _parse_enum(PollMethod, method_s, i),
                    fa,
                    fb,
                )
            )
    polls.sort(key=lambda p: p.end_date)
    return polls


def write_polls(path: str | Path, polls: Sequence[PollRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_POLL_HEADER)
        for p in polls:
            writer.writerow(
                [
                    p.pollster,
                    p.end_date.isoformat(),
                    p.population.value,
                    p.method.value,
                    f"{p.favor_a:g}",
                    f"{p.favor_b:g}",
                ]
            )
