"""Raw tweet text to token bag: negation marking, cleaning, tokenization.

The pipeline order is fixed as negation -> clean -> tokenize because
negation scope is bounded by punctuation and cleaning deletes punctuation.

Cue and stop-word lists are plain UTF-8 files, one lowercase entry per
line, ``#`` comment lines ignored; defaults ship with the package.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import AbstractSet, Iterable, Sequence

from .errors import ValidationError

# Punctuation deleted by clean(); underscore survives so NOT_ prefixes do.
_PUNCT_CHARS = "".join(c for c in string.punctuation if c != "_")
_PUNCT_DELETE = str.maketrans("", "", _PUNCT_CHARS)
# Punctuation that terminates a negation scope. The apostrophe is excluded:
# contractions ("don't", "obama's") are ordinary words inside a scope.
_SCOPE_PUNCT = frozenset(_PUNCT_CHARS) - {"'"}
_URL_RE = re.compile(r"(?i)^(?:[a-z][a-z0-9+.-]*://|www\.)")
_HASHTAG_BODY_RE = re.compile(r"[A-Za-z0-9_]+")

NEGATION_PREFIX = "NOT_"


@dataclass(frozen=True)
class CandidateSpec:
    """A candidate name with its lowercase alias set."""

    name: str
    aliases: frozenset[str]

    def __post_init__(self):
        if not self.aliases:
            raise ValidationError(f"candidate {self.name!r} has no aliases")
        if any(a != a.lower() or not a for a in self.aliases):
            raise ValidationError(
                f"aliases of {self.name!r} must be non-empty lowercase strings"
            )


def validate_candidates(candidates: Sequence[CandidateSpec]) -> None:
    """Alias sets of distinct candidates must be disjoint."""
    seen: dict[str, str] = {}
    for c in candidates:
        for a in c.aliases:
            if a in seen and seen[a] != c.name:
                raise ValidationError(
                    f"alias {a!r} shared by candidates {seen[a]!r} and {c.name!r}"
                )
            seen[a] = c.name


def load_wordlist(path: str | Path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.strip()
            if entry and not entry.startswith("#"):
                words.add(entry.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("trendmine.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        w.strip().lower()
        for w in text.splitlines()
        if w.strip() and not w.startswith("#")
    )


@lru_cache(maxsize=1)
def default_negation_cues() -> frozenset[str]:
    text = resources.files("trendmine.data").joinpath("negation_cues.txt").read_text("utf-8")
    return frozenset(
        w.strip().lower()
        for w in text.splitlines()
        if w.strip() and not w.startswith("#")
    )


def mark_negation(text: str, cues: AbstractSet[str] | None = None) -> str:
    """Prefix words following a negation cue with ``NOT_`` until punctuation.

    The cue itself is left unchanged; the scope closes at the first
    punctuation character (apostrophes excepted), which may sit at the end
    of the last prefixed word.  Words are whitespace-delimited and rejoined
    with single spaces.
    """
    if cues is None:
        cues = default_negation_cues()
    out: list[str] = []
    in_scope = False
    for word in text.split():
        if in_scope and word[0] in _SCOPE_PUNCT:
            in_scope = False
        if in_scope:
            out.append(NEGATION_PREFIX + word)
            if any(c in _SCOPE_PUNCT for c in word):
                in_scope = False
        else:
            out.append(word)
            if word.lower() in cues:
                in_scope = True
    return " ".join(out)


def _is_numeric_token(token: str) -> bool:
    core = token.translate(_PUNCT_DELETE)
    return core.isdigit()


def clean(text: str) -> str:
    """Strip noise and lowercase.

    Removes, in order: URLs (scheme- or ``www.``-prefixed tokens),
    ``@``-mentions, the standalone token ``RT``, ``#``-hashtags, numeric
    tokens, then punctuation characters (underscore excepted); finally
    lowercases.  The result never exceeds the input in length.
    """
    out: list[str] = []
    for token in text.split():
        if _URL_RE.match(token):
            continue
        if token.startswith("@"):
            continue
        if token == "RT":
            continue
        if token.startswith("#"):
            continue
        if _is_numeric_token(token):
            continue
        stripped = token.translate(_PUNCT_DELETE)
        if stripped:
            out.append(stripped.lower())
    return " ".join(out)


def tokenize(text: str, stopwords: AbstractSet[str] | None = None) -> list[str]:
    """Split cleaned text on whitespace and drop stop words.

    Matching is on the exact lowercased token, except that a negation-marked
    token ``not_w`` is dropped when its bare form ``w`` is a stop word.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens: list[str] = []
    for raw in text.split():
        tok = raw.lower()
        if tok in stopwords:
            continue
        if tok.startswith("not_") and tok[4:] in stopwords:
            continue
        tokens.append(tok)
    return tokens


def preprocess(
    text: str,
    stopwords: AbstractSet[str] | None = None,
    cues: AbstractSet[str] | None = None,
) -> list[str]:
    """Full pipeline: ``tokenize(clean(mark_negation(text)))``."""
    return tokenize(clean(mark_negation(text, cues)), stopwords)


def detect_mentions(text: str, candidates: Iterable[CandidateSpec]) -> set[str]:
    """Candidates whose alias occurs case-insensitively as a raw substring.

    Hashtag and @-handle occurrences count here, unlike classification
    tokens, because mention statistics are computed before cleaning.
    """
    low = text.lower()
    return {c.name for c in candidates if any(a in low for a in c.aliases)}


def extract_hashtags(text: str) -> list[str]:
    """Lowercased ``#tags`` from raw text, in order of appearance.

    A tag is the run of word characters after ``#``; embedded punctuation
    ends the tag and trailing punctuation is dropped.
    """
    tags: list[str] = []
    for token in text.split():
        if token.startswith("#"):
            m = _HASHTAG_BODY_RE.match(token, 1)
            if m:
                tags.append("#" + m.group(0).lower())
    return tags
