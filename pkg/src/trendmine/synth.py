"""Seeded synthetic corpora with planted ground truth.

A scenario plants daily volumes with spike days, candidate mention mixes,
sentiment proportions (globally and per state), topic-word distributions,
and poll margins, then renders everything through noisy tweet templates
(URLs, @-handles, RT markers, hashtags, numbers, negation patterns) so the
full text pipeline is exercised, not just the classifiers.  Output uses
exactly the corpus file formats; the ground-truth JSON records every
planted quantity plus realized per-day counts for later scoring.

Generation is deterministic under the scenario seed.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidSpec
from .geo import StatePoint, Winner, default_states
from .records import (
    PollMethod,
    PollRecord,
    Population,
    TweetFormat,
    TweetRecord,
    GeoPoint,
    write_polls,
    write_tweets,
)
from .textprep import CandidateSpec, default_stopwords, detect_mentions, validate_candidates

_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()
_DAY_OFFSET_SECONDS = -480 * 60  # generated timestamps live in PST days

_DEFAULT_CANDIDATES = (
    CandidateSpec("obama", frozenset({"obama", "barack"})),
    CandidateSpec("romney", frozenset({"romney", "mitt"})),
)

_POS_WORDS = ("win", "great", "hope", "proud", "strong", "awesome", "love")
_NEG_WORDS = ("lose", "awful", "fail", "weak", "liar", "disaster", "worst")
_NEU_WORDS = ("watching", "tonight", "speech", "rally", "statement", "interview")
_FILLER_WORDS = (
    "people",
    "country",
    "campaign",
    "president",
    "voters",
    "question",
    "answer",
    "policy",
    "economy",
    "jobs",
)
_BASE_HASHTAGS = ("#election", "#vote", "#politics", "#uspoli")
_SOURCES = (
    ("Twitter for iPhone", 0.32),
    ("web", 0.22),
    ("Twitter for Android", 0.20),
    ("Echofon", 0.027),
    ("Mobile Web", 0.025),
    ("Twitter for iPad", 0.023),
    ("TweetDeck", 0.023),
    ("TweetCaster for Android", 0.018),
    ("twitterfeed", 0.014),
    ("Tweet Button", 0.011),
    ("other", 0.099),
)
_POLLSTERS = (
    "Rasmussen",
    "Ipsos/Reuters (Web)",
    "YouGov/Economist",
    "UPI/CVOTER",
    "Gallup",
    "ARG",
)


@dataclass(frozen=True)
class StateScenario:
    """Geo record count and planted class proportions for one state.

    The four proportions are the chance a geo record is a positive/negative
    text about candidate A/B; the remainder is neutral chatter.
    """

    count: int
    pos_a: float
    neg_a: float
    pos_b: float
    neg_b: float

    def proportions(self) -> tuple[float, float, float, float]:
        return (self.pos_a, self.neg_a, self.pos_b, self.neg_b)

    def planted_winner(self) -> Winner:
        plus = self.pos_a / self.pos_b if self.pos_b > 0 else None
        minus = self.neg_a / self.neg_b if self.neg_b > 0 else None
        if plus is None or minus is None or plus == minus:
            return Winner.UNDECIDED
        return Winner.A if plus > minus else Winner.B


@dataclass(frozen=True)
class TopicScenario:
    """Planted topic-word rows and the document mixture prior."""

    phi: tuple[dict[str, float], ...]
    docs_per_day: int = 0
    doc_length: int = 12
    doc_topic_alpha: float = 0.08


@dataclass(frozen=True)
class PollScenario:
    """Daily favor margins; noise is bounded so the planted leader holds."""

    per_day: int = 3
    base_a: float = 47.0
    base_b: float = 46.0
    margins: dict[date, float] = field(default_factory=dict)
    noise: float = 0.4

    def planted_margin(self, day: date) -> float:
        return self.base_a + self.margins.get(day, 0.0) - self.base_b


@dataclass(frozen=True)
class ScenarioSpec:
    start_day: date
    end_day: date
    seed: int = 0
    candidates: tuple[CandidateSpec, CandidateSpec] = _DEFAULT_CANDIDATES
    base_daily_volume: int = 200
    spike_days: dict[date, float] = field(default_factory=dict)
    mention_a: float = 0.40
    mention_b: float = 0.30
    mention_both: float = 0.05
    sentiment_pos: float = 0.25
    sentiment_neg: float = 0.35
    pos_words: tuple[str, ...] = _POS_WORDS
    neg_words: tuple[str, ...] = _NEG_WORDS
    neutral_words: tuple[str, ...] = _NEU_WORDS
    filler_words: tuple[str, ...] = _FILLER_WORDS
    base_hashtags: tuple[str, ...] = _BASE_HASHTAGS
    day_hashtags: dict[date, tuple[str, ...]] = field(default_factory=dict)
    day_mentions: dict[date, tuple[float, float, float]] = field(default_factory=dict)
    states: dict[str, StateScenario] = field(default_factory=dict)
    geo_jitter_degrees: float = 0.05
    topics: TopicScenario | None = None
    polls: PollScenario | None = None
    tweet_format: TweetFormat = TweetFormat.DELIMITED


@dataclass(frozen=True)
class ScenarioPaths:
    tweets: Path
    polls: Path
    truth: Path
    labeled: Path | None = None


def _validate(spec: ScenarioSpec) -> list[StatePoint]:
    if spec.start_day > spec.end_day:
        raise InvalidSpec("empty day range: start_day is after end_day")
    if spec.base_daily_volume < 0:
        raise InvalidSpec("base_daily_volume must be nonnegative")
    validate_candidates(spec.candidates)
    for probs in [
        (spec.mention_a, spec.mention_b, spec.mention_both),
        *spec.day_mentions.values(),
    ]:
        if any(p < 0 for p in probs) or sum(probs) > 1.0 + 1e-9:
            raise InvalidSpec(f"mention probabilities {probs} invalid")
    if spec.sentiment_pos < 0 or spec.sentiment_neg < 0:
        raise InvalidSpec("sentiment proportions must be nonnegative")
    if spec.sentiment_pos + spec.sentiment_neg > 1.0 + 1e-9:
        raise InvalidSpec("sentiment proportions exceed 1")
    for code, st in spec.states.items():
        props = st.proportions()
        if any(p < 0 for p in props) or sum(props) > 1.0 + 1e-9:
            raise InvalidSpec(f"state {code}: proportions {props} invalid")
        if st.count < 0:
            raise InvalidSpec(f"state {code}: negative count")
    anchors = default_states()
    anchor_codes = {p.code for p in anchors}
    unknown = set(spec.states) - anchor_codes
    if unknown:
        raise InvalidSpec(f"states without anchor points: {sorted(unknown)}")
    aliases = [a for c in spec.candidates for a in c.aliases]
    wordpools = (
        spec.pos_words
        + spec.neg_words
        + spec.neutral_words
        + spec.filler_words
    )
    for w in wordpools:
        if any(a in w for a in aliases):
            raise InvalidSpec(f"pool word {w!r} embeds a candidate alias")
    if spec.topics is not None:
        stop = default_stopwords()
        for i, row in enumerate(spec.topics.phi):
            total = sum(row.values())
            if abs(total - 1.0) > 1e-9 or any(p < 0 for p in row.values()):
                raise InvalidSpec(f"phi row {i} is not a distribution (sum {total})")
            for w in row:
                if w != w.lower() or not w.isalpha():
                    raise InvalidSpec(f"topic word {w!r} will not survive cleaning")
                if w in stop or any(a in w for a in aliases):
                    raise InvalidSpec(f"topic word {w!r} collides with stop/alias lists")
        if spec.topics.docs_per_day < 0 or spec.topics.doc_length < 1:
            raise InvalidSpec("topic doc counts must be positive")
    if spec.polls is not None:
        p = spec.polls
        if p.per_day < 0 or p.noise < 0:
            raise InvalidSpec("poll counts and noise must be nonnegative")
        day = spec.start_day
        while day <= spec.end_day:
            m = p.planted_margin(day)
            # Uniform noise on both sides plus 0.1-point rounding must not
            # be able to flip the sign of the planted margin.
            if m != 0.0 and 2 * p.noise + 0.1 > abs(m):
                raise InvalidSpec(
                    f"poll noise {p.noise} can flip the planted leader on {day}"
                )
            fa_max = p.base_a + p.margins.get(day, 0.0) + p.noise + 0.05
            fb_max = p.base_b + p.noise + 0.05
            fa_min = p.base_a + p.margins.get(day, 0.0) - p.noise - 0.05
            fb_min = p.base_b - p.noise - 0.05
            if fa_max + fb_max > 100.0 or fa_min < 0.0 or fb_min < 0.0:
                raise InvalidSpec("poll favor levels leave the [0, 100] budget")
            day += timedelta(days=1)
    if spec.geo_jitter_degrees < 0:
        raise InvalidSpec("geo jitter must be nonnegative")
    return anchors


def _days(spec: ScenarioSpec) -> list[date]:
    out = []
    day = spec.start_day
    while day <= spec.end_day:
        out.append(day)
        day += timedelta(days=1)
    return out


def _cumulative(weights: Sequence[float]) -> list[float]:
    cum, total = [], 0.0
    for w in weights:
        total += w
        cum.append(total)
    return cum


def _pick(rng: np.random.Generator, items: Sequence, cum: Sequence[float]):
    return items[bisect_right(cum, rng.random() * cum[-1])]


_SOURCE_ITEMS = tuple(s for s, _ in _SOURCES)
_SOURCE_CUM = _cumulative([w for _, w in _SOURCES])
_POP_ITEMS = (Population.LIKELY_VOTERS, Population.REGISTERED_VOTERS)
_POP_CUM = _cumulative([0.98, 0.02])
_METHOD_ITEMS = (
    PollMethod.AUTOMATED_PHONE,
    PollMethod.PHONE,
    PollMethod.INTERNET,
    PollMethod.MIXED,
)
_METHOD_CUM = _cumulative([0.534, 0.243, 0.184, 0.039])


class _TweetFactory:
    """Assembles noisy tweet texts and records around planted content."""

    def __init__(self, spec: ScenarioSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.counter = 0
        self.mention_styles = ("plain", "caps", "hashtag", "handle")

    def _timestamp(self, day: date) -> int:
        base = (day.toordinal() - _EPOCH_ORDINAL) * 86400 - _DAY_OFFSET_SECONDS
        return base + int(self.rng.integers(0, 86400))

    def _mention(self, candidate: CandidateSpec) -> str:
        alias = _pick(self.rng, sorted(candidate.aliases), self._alias_cum(candidate))
        style = self.mention_styles[int(self.rng.integers(0, len(self.mention_styles)))]
        if style == "caps":
            return alias.capitalize()
        if style == "hashtag":
            return "#" + alias.capitalize()
        if style == "handle":
            return "@" + alias
        return alias

    def _alias_cum(self, candidate: CandidateSpec) -> list[float]:
        return _cumulative([1.0] * len(candidate.aliases))

    def _words(self, pool: Sequence[str], n: int) -> list[str]:
        return [pool[int(i)] for i in self.rng.integers(0, len(pool), size=n)]

    def _noise_prefix(self) -> list[str]:
        parts = []
        r = self.rng.random()
        if r < 0.15:
            parts += ["RT", f"@user{int(self.rng.integers(1000, 9999))}:"]
        elif r < 0.25:
            parts.append(f"@user{int(self.rng.integers(1000, 9999))}")
        return parts

    def _noise_suffix(self, day: date) -> list[str]:
        parts = []
        if self.rng.random() < 0.20:
            parts.append(f"http://t.co/{int(self.rng.integers(10000, 99999)):x}")
        if self.rng.random() < 0.15:
            parts.append(str(2000 + int(self.rng.integers(0, 20))))
        tags = list(self.spec.base_hashtags) + list(self.spec.day_hashtags.get(day, ()))
        if tags and self.rng.random() < 0.45:
            parts.append(tags[int(self.rng.integers(0, len(tags)))])
        return parts

    def _sentiment_phrase(self, label: int) -> list[str]:
        spec = self.spec
        if label > 0:
            direct, opposite = spec.pos_words, spec.neg_words
        elif label < 0:
            direct, opposite = spec.neg_words, spec.pos_words
        else:
            return self._words(spec.neutral_words, 2)
        # One in five polar phrases is expressed by negating the opposite
        # lexicon, exercising the NOT_ path end to end.  The comma closes
        # the negation scope so the direct word stays unmarked.
        if self.rng.random() < 0.2:
            negated = self._words(opposite, 1)[0] + ","
            return ["don't", negated] + self._words(direct, 1)
        return self._words(direct, 2)

    def make_text(self, day: date, mention: CandidateSpec | None, label: int,
                  extra_mention: CandidateSpec | None = None) -> str:
        parts = self._noise_prefix()
        if mention is not None:
            parts.append(self._mention(mention))
        parts += self._sentiment_phrase(label)
        parts += self._words(self.spec.filler_words, 1)
        if extra_mention is not None:
            parts.append(self._mention(extra_mention))
        parts += self._noise_suffix(day)
        if self.rng.random() < 0.3:
            parts[-1] = parts[-1] + "!"
        return " ".join(parts)

    def make_record(self, day: date, text: str, geo: GeoPoint | None = None) -> TweetRecord:
        self.counter += 1
        return TweetRecord(
            id=f"t{self.counter:08d}",
            timestamp=self._timestamp(day),
            source=_pick(self.rng, _SOURCE_ITEMS, _SOURCE_CUM),
            author=f"user{int(self.rng.integers(1, 10_000_000))}",
            text=text,
            geo=geo,
        )


def generate(spec: ScenarioSpec, out_dir: str | Path) -> ScenarioPaths:
    """Write ``tweets``, ``polls.csv`` and ``truth.json`` under ``out_dir``."""
    anchors = {p.code: p for p in _validate(spec)}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed % 2**63)
    factory = _TweetFactory(spec, rng)
    days = _days(spec)
    cand_a, cand_b = spec.candidates

    records: list[TweetRecord] = []
    daily_volume = {d: 0 for d in days}
    mention_counts = {d: {cand_a.name: 0, cand_b.name: 0} for d in days}
    planted_pos = planted_neg = 0

    def add(day: date, rec: TweetRecord) -> None:
        records.append(rec)
        daily_volume[day] += 1
        for name in detect_mentions(rec.text, spec.candidates):
            mention_counts[day][name] += 1

    # Daily stream: mention mix and sentiment mix drawn per record.
    for day in days:
        volume = round(spec.base_daily_volume * spec.spike_days.get(day, 1.0))
        m_a, m_b, m_both = spec.day_mentions.get(
            day, (spec.mention_a, spec.mention_b, spec.mention_both)
        )
        for _ in range(volume):
            r = rng.random()
            if r < m_a:
                mention, extra = cand_a, None
            elif r < m_a + m_b:
                mention, extra = cand_b, None
            elif r < m_a + m_b + m_both:
                mention, extra = cand_a, cand_b
            else:
                mention, extra = None, None
            if mention is None or extra is not None:
                label = 0
            else:
                s = rng.random()
                if s < spec.sentiment_pos:
                    label = 1
                elif s < spec.sentiment_pos + spec.sentiment_neg:
                    label = -1
                else:
                    label = 0
                planted_pos += label == 1
                planted_neg += label == -1
            add(day, factory.make_record(day, factory.make_text(day, mention, label, extra)))

    # Topic documents: pure token bags with no candidate mentions.
    if spec.topics is not None and spec.topics.docs_per_day > 0:
        t = spec.topics
        k = len(t.phi)
        topic_words = [sorted(row) for row in t.phi]
        topic_cums = [_cumulative([row[w] for w in words])
                      for row, words in zip(t.phi, topic_words)]
        for day in days:
            for _ in range(t.docs_per_day):
                theta = rng.dirichlet([t.doc_topic_alpha] * k)
                theta_cum = _cumulative(theta.tolist())
                words = []
                for _ in range(t.doc_length):
                    topic = bisect_right(theta_cum, rng.random() * theta_cum[-1])
                    words.append(_pick(rng, topic_words[topic], topic_cums[topic]))
                add(day, factory.make_record(day, " ".join(words)))

    # Geo records: per-state planted proportions, coordinates jittered
    # around the state anchor by less than half the closest anchor gap.
    for code in sorted(spec.states):
        st = spec.states[code]
        anchor = anchors[code]
        cum = _cumulative(list(st.proportions()) + [max(0.0, 1.0 - sum(st.proportions()))])
        classes = ("pos_a", "neg_a", "pos_b", "neg_b", "neutral")
        for _ in range(st.count):
            cls = _pick(rng, classes, cum)
            if cls == "neutral":
                mention, label = (None, 0)
            else:
                mention = cand_a if cls.endswith("_a") else cand_b
                label = 1 if cls.startswith("pos") else -1
            day = days[int(rng.integers(0, len(days)))]
            jitter = spec.geo_jitter_degrees
            geo = GeoPoint(
                lat=anchor.lat + float(rng.uniform(-jitter, jitter)),
                lon=anchor.lon + float(rng.uniform(-jitter, jitter)),
            )
            add(day, factory.make_record(day, factory.make_text(day, mention, label), geo))

    tweets_name = "tweets.tsv" if spec.tweet_format is TweetFormat.DELIMITED else "tweets.jsonl"
    tweets_path = out / tweets_name
    write_tweets(tweets_path, records, spec.tweet_format)

    # Polls.
    polls: list[PollRecord] = []
    poll_leaders: dict[date, str] = {}
    if spec.polls is not None and spec.polls.per_day > 0:
        p = spec.polls
        for day in days:
            margin = p.planted_margin(day)
            poll_leaders[day] = "A" if margin > 0 else "B" if margin < 0 else "tie"
            for _ in range(p.per_day):
                fa = p.base_a + p.margins.get(day, 0.0) + float(rng.uniform(-p.noise, p.noise))
                fb = p.base_b + float(rng.uniform(-p.noise, p.noise))
                polls.append(
                    PollRecord(
                        pollster=_pick(rng, _POLLSTERS, _cumulative([1.0] * len(_POLLSTERS))),
                        end_date=day,
                        population=_pick(rng, _POP_ITEMS, _POP_CUM),
                        method=_pick(rng, _METHOD_ITEMS, _METHOD_CUM),
                        favor_a=round(fa, 1),
                        favor_b=round(fb, 1),
                    )
                )
    polls_path = out / "polls.csv"
    write_polls(polls_path, polls)

    truth = {
        "seed": spec.seed,
        "start_day": spec.start_day.isoformat(),
        "end_day": spec.end_day.isoformat(),
        "tweet_format": spec.tweet_format.value,
        "candidates": {"a": cand_a.name, "b": cand_b.name},
        "aliases": {
            cand_a.name: sorted(cand_a.aliases),
            cand_b.name: sorted(cand_b.aliases),
        },
        "records_total": len(records),
        "daily_volume": {d.isoformat(): daily_volume[d] for d in days},
        "spike_days": sorted(d.isoformat() for d in spec.spike_days),
        "mention_counts": {
            d.isoformat(): mention_counts[d] for d in days
        },
        "sentiment_mix": {"pos": spec.sentiment_pos, "neg": spec.sentiment_neg},
        "planted_sentiment_counts": {"pos": planted_pos, "neg": planted_neg},
        "states": {
            code: {
                "count": st.count,
                "proportions": dict(zip(("pos_a", "neg_a", "pos_b", "neg_b"), st.proportions())),
                "winner": st.planted_winner().value,
            }
            for code, st in sorted(spec.states.items())
        },
        "poll_leaders": {d.isoformat(): poll_leaders[d] for d in sorted(poll_leaders)},
        "poll_a_lead_days": sum(1 for v in poll_leaders.values() if v == "A"),
        "topics": (
            {
                "phi": [dict(sorted(row.items())) for row in spec.topics.phi],
                "docs_per_day": spec.topics.docs_per_day,
                "doc_length": spec.topics.doc_length,
            }
            if spec.topics is not None
            else None
        ),
    }
    truth_path = out / "truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ScenarioPaths(tweets=tweets_path, polls=polls_path, truth=truth_path)


def generate_labeled(spec: ScenarioSpec, n: int, path: str | Path) -> Path:
    """Write ``n`` labeled rows balanced across the three labels within one.

    Stands in for a hand-labeled training file; texts come from the planted
    lexicons through the same noisy templates as the corpus.
    """
    if n < 3:
        raise InvalidSpec(f"need at least one example per label, got n={n}")
    _validate(spec)
    # Labeled texts must mention exactly one candidate, so hashtag pools
    # that embed an alias are scrubbed for this file.
    aliases = [a for c in spec.candidates for a in c.aliases]
    spec = replace(
        spec,
        day_hashtags={},
        base_hashtags=tuple(
            t for t in spec.base_hashtags if not any(a in t for a in aliases)
        ),
    )
    rng = np.random.default_rng([spec.seed % 2**63, 0xAB])
    factory = _TweetFactory(spec, rng)
    labels = [1, -1, 0]
    counts = {l: n // 3 for l in labels}
    for l in labels[: n % 3]:
        counts[l] += 1
    path = Path(path)
    day = spec.start_day
    with open(path, "w", encoding="utf-8") as fh:
        i = 0
        for label in labels:
            for _ in range(counts[label]):
                candidate = spec.candidates[i % 2]
                i += 1
                text = factory.make_text(day, candidate, label)
                fh.write(f"{text}\t{candidate.name}\t{label:+d}\n" if label else f"{text}\t{candidate.name}\t0\n")
    return path


def load_truth(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def default_scenario(seed: int = 0) -> ScenarioSpec:
    """A small election-shaped demo: spikes on the 2012 debate days and
    election day, every state planted, polls with a drifting margin."""
    start, end = date(2012, 9, 29), date(2012, 11, 16)
    spikes = {
        date(2012, 10, 3): 3.5,
        date(2012, 10, 11): 2.5,
        date(2012, 10, 16): 2.8,
        date(2012, 10, 22): 3.0,
        date(2012, 11, 6): 5.0,
    }
    day_hashtags = {d: ("#debate",) for d in list(spikes)[:4]}
    day_hashtags[date(2012, 11, 6)] = ("#electionday",)
    states = {}
    for i, p in enumerate(default_states()):
        if i % 2 == 0:
            states[p.code] = StateScenario(count=120, pos_a=0.30, neg_a=0.15, pos_b=0.15, neg_b=0.30)
        else:
            states[p.code] = StateScenario(count=120, pos_a=0.15, neg_a=0.30, pos_b=0.30, neg_b=0.15)
    margins = {}
    day = start
    while day <= end:
        margins[day] = 2.0 if day.toordinal() % 3 else -3.0
        day += timedelta(days=1)
    return ScenarioSpec(
        start_day=start,
        end_day=end,
        seed=seed,
        base_daily_volume=220,
        spike_days=spikes,
        day_hashtags=day_hashtags,
        states=states,
        polls=PollScenario(per_day=2, margins=margins, noise=0.4),
        topics=TopicScenario(
            phi=(
                {"taxes": 0.35, "deficit": 0.25, "spending": 0.2, "budget": 0.2},
                {"libya": 0.4, "benghazi": 0.3, "consulate": 0.3},
                {"healthcare": 0.4, "insurance": 0.35, "medicare": 0.25},
            ),
            docs_per_day=25,
            doc_length=10,
        ),
    )
