"""Run configuration: TOML file plus command-line overrides.

Precedence is CLI flag > config file > built-in default.  The resolved
configuration hashes to a short digest that is embedded in every output
file together with the seed, so identical runs are byte-identical and
attributable.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import ValidationError
from .lda import LdaConfig
from .records import RNG_ALGORITHM, TimeWindow, TweetFormat
from .textprep import CandidateSpec

SEED_ENV_VAR = "TRENDMINE_SEED"

_DEFAULT_CANDIDATES = (
    CandidateSpec("obama", frozenset({"obama", "barack"})),
    CandidateSpec("romney", frozenset({"romney", "mitt"})),
)


@dataclass
class RunConfig:
    tweets: Path | None = None
    tweet_format: TweetFormat = TweetFormat.DELIMITED
    polls: Path | None = None
    labeled: Path | None = None
    model: Path | None = None
    states: Path | None = None  # None -> shipped anchor file
    truth: Path | None = None
    out: Path = Path("out")
    run_id: str | None = None  # None -> derived from the config hash
    seed: int = 0
    sample_size: int = 10000
    window: TimeWindow | None = None  # None -> inferred from the corpus
    candidates: tuple[CandidateSpec, ...] = _DEFAULT_CANDIDATES
    stopwords_path: Path | None = None
    cues_path: Path | None = None
    uniform_priors: bool = False
    haversine: bool = False
    offshore_threshold_degrees: float | None = None
    min_prominence: float = 1.5
    top_n: int = 10
    lda: LdaConfig = field(default_factory=LdaConfig)
    lda_day: date | None = None  # None -> busiest day
    out_format: str = "csv"
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValidationError("sample_size must be >= 1")
        if self.out_format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.out_format!r}")
        if self.rng_algorithm != RNG_ALGORITHM:
            raise ValidationError(
                f"unsupported rng algorithm {self.rng_algorithm!r}; this build provides {RNG_ALGORITHM!r}"
            )
        if len(self.candidates) != 2:
            raise ValidationError("exactly two candidates are required")

    def require_inputs(self, *names: str) -> None:
        """Fail fast when a referenced input path is absent or missing."""
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ValidationError(f"missing required input: --{name.replace('_', '-')}")
            if not Path(value).exists():
                raise FileNotFoundError(f"{name} file not found: {value}")

    def to_canonical_dict(self) -> dict[str, Any]:
        lda = self.lda
        return {
            "version": __version__,
            "tweets": str(self.tweets) if self.tweets else None,
            "tweet_format": self.tweet_format.value,
            "polls": str(self.polls) if self.polls else None,
            "labeled": str(self.labeled) if self.labeled else None,
            "model": str(self.model) if self.model else None,
            "states": str(self.states) if self.states else None,
            "truth": str(self.truth) if self.truth else None,
            "seed": self.seed,
            "sample_size": self.sample_size,
            "window": (
                {
                    "start": self.window.start,
                    "end": self.window.end,
                    "day_offset_minutes": self.window.day_offset_minutes,
                }
                if self.window
                else None
            ),
            "candidates": [
                {"name": c.name, "aliases": sorted(c.aliases)} for c in self.candidates
            ],
            "stopwords": str(self.stopwords_path) if self.stopwords_path else None,
            "negation_cues": str(self.cues_path) if self.cues_path else None,
            "uniform_priors": self.uniform_priors,
            "haversine": self.haversine,
            "offshore_threshold_degrees": self.offshore_threshold_degrees,
            "min_prominence": self.min_prominence,
            "top_n": self.top_n,
            "lda": {
                "k": lda.k,
                "alpha": lda.alpha,
                "beta": lda.beta,
                "iterations": lda.iterations,
                "seed": lda.seed,
                "top_n": lda.top_n,
                "min_token_count": lda.min_token_count,
            },
            "lda_day": self.lda_day.isoformat() if self.lda_day else None,
            "format": self.out_format,
            "rng": self.rng_algorithm,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_canonical_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def resolved_run_id(self) -> str:
        return self.run_id if self.run_id else f"r{self.config_hash()}"

    def meta(self) -> dict[str, Any]:
        """Provenance block embedded in every output file."""
        return {
            "version": __version__,
            "seed": self.seed,
            "config": self.config_hash(),
            "rng": self.rng_algorithm,
        }


def _parse_epoch(value) -> int:
    if isinstance(value, bool):
        raise ValidationError("window bounds must be integers or ISO-8601 strings")
    if isinstance(value, int):
        return value
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return int(value.timestamp())
    if isinstance(value, str):
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise ValidationError(f"cannot interpret window bound {value!r}")


def load_config_file(path: str | Path) -> dict[str, Any]:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def build_config(file_values: dict[str, Any] | None = None, **overrides) -> RunConfig:
    """Merge defaults, config-file values, and CLI overrides (None means
    'not given' for an override)."""
    raw: dict[str, Any] = {}
    fv = file_values or {}

    paths = fv.get("paths", {})
    for key, attr in [
        ("tweets", "tweets"),
        ("polls", "polls"),
        ("labeled", "labeled"),
        ("model", "model"),
        ("states", "states"),
        ("truth", "truth"),
        ("out", "out"),
        ("stopwords", "stopwords_path"),
        ("negation_cues", "cues_path"),
    ]:
        if key in paths:
            raw[attr] = Path(paths[key])
    if "tweet_format" in paths:
        raw["tweet_format"] = TweetFormat(paths["tweet_format"])

    for key in ("seed", "sample_size", "run_id", "uniform_priors", "min_prominence", "top_n"):
        if key in fv:
            raw[key] = fv[key]
    if "format" in fv:
        raw["out_format"] = fv["format"]

    if "window" in fv:
        w = fv["window"]
        raw["window"] = TimeWindow(
            start=_parse_epoch(w["start"]),
            end=_parse_epoch(w["end"]),
            day_offset_minutes=int(w.get("day_offset_minutes", -480)),
        )

    if "candidates" in fv:
        raw["candidates"] = tuple(
            CandidateSpec(name, frozenset(a.lower() for a in aliases))
            for name, aliases in fv["candidates"].items()
        )

    geo = fv.get("geo", {})
    if "haversine" in geo:
        raw["haversine"] = bool(geo["haversine"])
    if "offshore_threshold_degrees" in geo:
        raw["offshore_threshold_degrees"] = float(geo["offshore_threshold_degrees"])

    lda_fv = fv.get("lda", {})
    lda_kwargs = {}
    for key, attr in [
        ("k", "k"),
        ("alpha", "alpha"),
        ("beta", "beta"),
        ("iterations", "iterations"),
        ("seed", "seed"),
        ("top_n", "top_n"),
        ("min_token_count", "min_token_count"),
    ]:
        if key in lda_fv:
            lda_kwargs[attr] = lda_fv[key]
    if "day" in lda_fv:
        raw["lda_day"] = date.fromisoformat(str(lda_fv["day"])) if not isinstance(
            lda_fv["day"], date
        ) else lda_fv["day"]

    # CLI overrides win over file values.
    lda_overrides = overrides.pop("lda", None) or {}
    for k, v in overrides.items():
        if v is not None:
            raw[k] = v
    for k, v in lda_overrides.items():
        if v is not None:
            lda_kwargs[k] = v

    if "seed" not in raw and SEED_ENV_VAR in os.environ:
        try:
            raw["seed"] = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ValidationError(
                f"{SEED_ENV_VAR} must be an integer, got {os.environ[SEED_ENV_VAR]!r}"
            ) from None

    lda_kwargs.setdefault("seed", raw.get("seed", 0))
    raw["lda"] = LdaConfig(**lda_kwargs)
    return RunConfig(**raw)
