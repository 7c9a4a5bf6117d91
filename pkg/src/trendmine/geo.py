"""Geographic sentiment: k-d tree state lookup, tallies, winner calls.

State anchors (one representative point per state plus DC) live in a
replaceable CSV shipped with the package.  Nearest-neighbor distance is
Euclidean in raw degrees to mirror the original method; great-circle
distance is available behind a flag but is off by default.

A state's winner is called from two ratios: positive tweets for candidate
A over positive for B, and the same for negatives.  A wins when the
positive ratio exceeds the negative one, B when it is smaller; equal or
undefined ratios leave the state undecided.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import AbstractSet, Iterable, Mapping, Sequence

from .errors import CodeMismatch, CoordinateOutOfRange, DuplicateCode, ValidationError
from .nb import NBModel, SentimentLabel, classify_candidate
from .records import TweetRecord
from .textprep import CandidateSpec

#: Map key under which far-from-any-anchor records are tallied when an
#: offshore threshold is configured.
OFFSHORE = "offshore"


@dataclass(frozen=True)
class StatePoint:
    code: str
    lat: float
    lon: float
    electoral_votes: int


class Winner(Enum):
    A = "A"
    B = "B"
    UNDECIDED = "Undecided"


@dataclass
class StateTally:
    code: str
    pos_a: int = 0
    neg_a: int = 0
    pos_b: int = 0
    neg_b: int = 0
    total_geo: int = 0


@dataclass(frozen=True)
class StateCall:
    code: str
    plus_ratio: float | None
    minus_ratio: float | None
    winner: Winner


class _Node:
    __slots__ = ("point", "axis", "left", "right")

    def __init__(self, point: StatePoint, axis: int):
        self.point = point
        self.axis = axis
        self.left: _Node | None = None
        self.right: _Node | None = None


class KdTree2:
    """Balanced 2-d tree over state points, keyed alternately on lat/lon.

    Built with median splits (equal keys ordered by insertion index, lower
    index to the left), giving depth at most ``ceil(log2 n) + 1``.
    """

    def __init__(self, points: Sequence[StatePoint]):
        if not points:
            raise ValidationError("cannot build a tree from zero points")
        seen = set()
        for p in points:
            if p.code in seen:
                raise DuplicateCode(f"duplicate state code {p.code!r}")
            seen.add(p.code)
        self.points = list(points)
        self.root = self._build(list(enumerate(points)), depth=0)

    def _build(self, indexed: list[tuple[int, StatePoint]], depth: int) -> _Node | None:
        if not indexed:
            return None
        axis = depth % 2
        indexed.sort(key=lambda ip: ((ip[1].lat, ip[1].lon)[axis], ip[0]))
        mid = len(indexed) // 2
        node = _Node(indexed[mid][1], axis)
        node.left = self._build(indexed[:mid], depth + 1)
        node.right = self._build(indexed[mid + 1 :], depth + 1)
        return node

    def depth(self) -> int:
        def walk(node):
            if node is None:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def nearest(self, lat: float, lon: float) -> StatePoint:
        """Point minimizing squared Euclidean degree distance; exact ties go
        to the lexicographically smallest code."""
        if not (-90.0 <= lat <= 90.0):
            raise CoordinateOutOfRange(f"latitude {lat} outside [-90, 90]")
        if not (-180.0 <= lon <= 180.0):
            raise CoordinateOutOfRange(f"longitude {lon} outside [-180, 180]")
        best_d2 = math.inf
        best: StatePoint | None = None

        def visit(node: _Node | None) -> None:
            nonlocal best_d2, best
            if node is None:
                return
            p = node.point
            d2 = (lat - p.lat) ** 2 + (lon - p.lon) ** 2
            if d2 < best_d2 or (d2 == best_d2 and p.code < best.code):
                best_d2, best = d2, p
            q = lat if node.axis == 0 else lon
            c = p.lat if node.axis == 0 else p.lon
            near, far = (node.left, node.right) if q < c else (node.right, node.left)
            visit(near)
            # <= keeps equal-distance candidates reachable for the tie rule.
            if (q - c) ** 2 <= best_d2:
                visit(far)

        visit(self.root)
        assert best is not None
        return best


def build_kdtree(points: Sequence[StatePoint]) -> KdTree2:
    return KdTree2(points)


def nearest_state(
    tree: KdTree2, lat: float, lon: float, haversine: bool = False
) -> StatePoint:
    """State anchor nearest to the query.

    With ``haversine=True`` the great-circle distance is used instead of
    raw-degree Euclidean; that metric invalidates the tree's axis bounds,
    so the lookup falls back to a scan over the (small) point set.
    """
    if not haversine:
        return tree.nearest(lat, lon)
    best = min(
        tree.points,
        key=lambda p: (_haversine_km(lat, lon, p.lat, p.lon), p.code),
    )
    return best


def _haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    r = 6371.0
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = math.radians(lat2 - lat1), math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(a))


def load_states(path: str | Path) -> list[StatePoint]:
    points: list[StatePoint] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            points.append(
                StatePoint(
                    code=row["code"].strip(),
                    lat=float(row["lat"]),
                    lon=float(row["lon"]),
                    electoral_votes=int(row["electoral_votes"]),
                )
            )
    return points


def default_states() -> list[StatePoint]:
    """The shipped 51-entry anchor file (50 states plus DC)."""
    with resources.as_file(
        resources.files("trendmine.data").joinpath("us_states.csv")
    ) as path:
        return load_states(path)


def aggregate_state_sentiment(
    records: Iterable[TweetRecord],
    model: NBModel,
    tree: KdTree2,
    candidates: Sequence[CandidateSpec],
    stopwords: AbstractSet[str] | None = None,
    cues: AbstractSet[str] | None = None,
    haversine: bool = False,
    offshore_threshold_degrees: float | None = None,
) -> dict[str, StateTally]:
    """Classify geo-tagged records and tally polarity per resolved state.

    Records without geo are ignored.  Every resolved record increments its
    state's ``total_geo``; only single-candidate, non-neutral records move
    the positive/negative counters.  With an offshore threshold set,
    records farther than that many degrees from every anchor are tallied
    under the ``offshore`` key instead of a state.
    """
    if len(candidates) != 2:
        raise ValidationError("exactly two candidates are required")
    a_name, b_name = candidates[0].name, candidates[1].name
    tallies: dict[str, StateTally] = {}
    for rec in records:
        if rec.geo is None:
            continue
        sp = nearest_state(tree, rec.geo.lat, rec.geo.lon, haversine=haversine)
        if offshore_threshold_degrees is not None:
            d = math.hypot(rec.geo.lat - sp.lat, rec.geo.lon - sp.lon)
            if d > offshore_threshold_degrees:
                off = tallies.setdefault(OFFSHORE, StateTally(OFFSHORE))
                off.total_geo += 1
                continue
        tally = tallies.setdefault(sp.code, StateTally(sp.code))
        tally.total_geo += 1
        result = classify_candidate(model, rec, candidates, stopwords, cues)
        if result is None:
            continue
        name, label = result
        if label is SentimentLabel.POSITIVE:
            if name == a_name:
                tally.pos_a += 1
            elif name == b_name:
                tally.pos_b += 1
        elif label is SentimentLabel.NEGATIVE:
            if name == a_name:
                tally.neg_a += 1
            elif name == b_name:
                tally.neg_b += 1
    return tallies


def _ratio(num: int, den: int) -> float | None:
    if den > 0:
        return num / den
    if num > 0:
        return math.inf
    return None


def call_state(tally: StateTally) -> StateCall:
    """Apply the ratio rule to one state's tally.

    ``plus_ratio = pos_a / pos_b`` (infinite when only the numerator is
    positive, undefined on 0/0) and likewise for negatives; any undefined
    ratio leaves the state undecided.
    """
    plus = _ratio(tally.pos_a, tally.pos_b)
    minus = _ratio(tally.neg_a, tally.neg_b)
    if plus is None or minus is None or plus == minus:
        winner = Winner.UNDECIDED
    elif plus > minus:
        winner = Winner.A
    else:
        winner = Winner.B
    return StateCall(tally.code, plus, minus, winner)


@dataclass(frozen=True)
class ScoreReport:
    overall_accuracy: float
    #: Accuracy over the states each candidate actually won (None if none).
    per_candidate: dict[Winner, float | None]
    #: Electoral votes summed by *predicted* winner.
    electoral: dict[Winner, int]
    correct: int
    total: int


def score_predictions(
    calls: Mapping[str, StateCall],
    actual: Mapping[str, Winner],
    electoral_votes: Mapping[str, int],
) -> ScoreReport:
    """Compare calls against actual winners; Undecided counts as incorrect."""
    if set(calls) != set(actual):
        missing = set(calls) ^ set(actual)
        raise CodeMismatch(f"call/actual code sets differ on {sorted(missing)}")
    if not set(calls) <= set(electoral_votes):
        raise CodeMismatch("electoral vote map does not cover all codes")
    correct = 0
    won_by: dict[Winner, list[bool]] = {Winner.A: [], Winner.B: []}
    electoral = {Winner.A: 0, Winner.B: 0, Winner.UNDECIDED: 0}
    for code, call in calls.items():
        truth = actual[code]
        hit = call.winner is truth
        correct += hit
        won_by[truth].append(hit)
        electoral[call.winner] += electoral_votes[code]
    per_candidate = {
        w: (sum(hits) / len(hits) if hits else None) for w, hits in won_by.items()
    }
    return ScoreReport(
        overall_accuracy=correct / len(calls),
        per_candidate=per_candidate,
        electoral=electoral,
        correct=correct,
        total=len(calls),
    )
