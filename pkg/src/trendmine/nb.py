"""Three-class Naive Bayes polarity classifier.

Counts are kept as exact integers; the smoothed word likelihood is
``(count(w, l) + 1) / (token_count(l) + |V|)``, where the denominator uses
the label's total *token* count (the only reading under which the
likelihoods of a label sum to one over the vocabulary).  Scoring runs in
log space to avoid underflow; ties are broken Neutral, then Negative,
then Positive, so an undecidable text never moves a candidate tally.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import AbstractSet, Iterable, Sequence

from .errors import EmptySample, MalformedRecord, MissingLabelClass
from .records import TweetRecord
from .textprep import CandidateSpec, detect_mentions, preprocess


class SentimentLabel(IntEnum):
    NEGATIVE = -1
    NEUTRAL = 0
    POSITIVE = 1


#: Canonical label order for matrices and serialized output.
LABELS = (SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL, SentimentLabel.POSITIVE)
#: Argmax scan order; the first strict maximum in this order wins ties.
TIE_ORDER = (SentimentLabel.NEUTRAL, SentimentLabel.NEGATIVE, SentimentLabel.POSITIVE)


@dataclass(frozen=True)
class LabeledExample:
    tokens: tuple[str, ...]
    target: str
    label: SentimentLabel


class NBModel:
    """Immutable trained model: vocabulary, per-label counts, priors."""

    def __init__(
        self,
        word_counts: dict[SentimentLabel, Counter],
        label_doc_counts: dict[SentimentLabel, int],
        uniform_priors: bool = False,
    ):
        self.word_counts = word_counts
        self.label_doc_counts = label_doc_counts
        self.uniform_priors = uniform_priors
        self.vocabulary: frozenset[str] = frozenset(
            w for c in word_counts.values() for w in c
        )
        self.label_token_counts = {
            l: sum(word_counts[l].values()) for l in LABELS
        }
        total_docs = sum(label_doc_counts.values())
        if uniform_priors:
            self.priors = {l: 1.0 / len(LABELS) for l in LABELS}
        else:
            self.priors = {l: label_doc_counts[l] / total_docs for l in LABELS}
        # Cached log likelihoods; unseen words share one value per label.
        v = len(self.vocabulary)
        self._log_unseen = {
            l: math.log(1.0 / (self.label_token_counts[l] + v)) for l in LABELS
        }
        self._log_lik = {
            l: {
                w: math.log((word_counts[l][w] + 1) / (self.label_token_counts[l] + v))
                for w in self.vocabulary
            }
            for l in LABELS
        }
        self._log_priors = {l: math.log(self.priors[l]) for l in LABELS}

    @property
    def vocabulary_size(self) -> int:
        return len(self.vocabulary)


def train(examples: Sequence[LabeledExample], uniform_priors: bool = False) -> NBModel:
    """Count tokens per label over the training examples.

    Raises :class:`MissingLabelClass` unless every label has at least one
    example.
    """
    word_counts: dict[SentimentLabel, Counter] = {l: Counter() for l in LABELS}
    doc_counts: dict[SentimentLabel, int] = {l: 0 for l in LABELS}
    for ex in examples:
        doc_counts[ex.label] += 1
        word_counts[ex.label].update(ex.tokens)
    missing = [l.name for l in LABELS if doc_counts[l] == 0]
    if missing:
        raise MissingLabelClass(f"no training examples for label(s): {missing}")
    return NBModel(word_counts, doc_counts, uniform_priors)


def word_likelihood(model: NBModel, word: str, label: SentimentLabel) -> float:
    """Laplace-smoothed ``P(word | label)``; out-of-vocabulary words count 0."""
    count = model.word_counts[label].get(word, 0)
    return (count + 1) / (model.label_token_counts[label] + model.vocabulary_size)


def log_posterior(
    model: NBModel, tokens: Sequence[str]
) -> dict[SentimentLabel, float]:
    """Unnormalized log posterior per label; duplicates count per occurrence."""
    scores = dict(model._log_priors)
    for tok in tokens:
        for l in LABELS:
            scores[l] += model._log_lik[l].get(tok, model._log_unseen[l])
    return scores


def classify(model: NBModel, tokens: Sequence[str]) -> SentimentLabel:
    """Label with the maximum log posterior, ties broken in ``TIE_ORDER``."""
    scores = log_posterior(model, tokens)
    best = TIE_ORDER[0]
    for l in TIE_ORDER[1:]:
        if scores[l] > scores[best]:
            best = l
    return best


def classify_candidate(
    model: NBModel,
    record: TweetRecord,
    candidates: Sequence[CandidateSpec],
    stopwords: AbstractSet[str] | None = None,
    cues: AbstractSet[str] | None = None,
) -> tuple[str, SentimentLabel] | None:
    """Polarity of a single-candidate record, or ``None``.

    Records mentioning zero or more than one candidate are skipped, since
    attributing polarity in a multi-candidate text needs deeper parsing.
    """
    mentions = detect_mentions(record.text, candidates)
    if len(mentions) != 1:
        return None
    (name,) = mentions
    return name, classify(model, preprocess(record.text, stopwords, cues))


@dataclass(frozen=True)
class EvalResult:
    """Accuracy and a 3x3 confusion matrix (rows true, cols predicted,
    both in ``LABELS`` order: negative, neutral, positive)."""

    accuracy: float
    confusion: tuple[tuple[int, int, int], ...]
    total: int


def evaluate(model: NBModel, held_out: Sequence[LabeledExample]) -> EvalResult:
    if not held_out:
        raise EmptySample("cannot evaluate on an empty set")
    index = {l: i for i, l in enumerate(LABELS)}
    matrix = [[0, 0, 0] for _ in LABELS]
    for ex in held_out:
        pred = classify(model, ex.tokens)
        matrix[index[ex.label]][index[pred]] += 1
    correct = sum(matrix[i][i] for i in range(len(LABELS)))
    return EvalResult(
        accuracy=correct / len(held_out),
        confusion=tuple(tuple(row) for row in matrix),
        total=len(held_out),
    )


# ---------------------------------------------------------------------------
# Labeled-data file: ``text<TAB>target<TAB>label``; "NA" targets are skipped.


def load_labeled(
    path: str | Path,
    stopwords: AbstractSet[str] | None = None,
    cues: AbstractSet[str] | None = None,
) -> list[LabeledExample]:
    """Load and preprocess a labeled file with the inference token pipeline,
    so train- and classify-time features match by construction."""
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedRecord(
                    f"expected 3 tab-separated fields, got {len(parts)}", i
                )
            text, target, label_s = parts
            if target == "NA":
                continue
            try:
                value = int(label_s)
                label = SentimentLabel(value)
            except ValueError:
                raise MalformedRecord(
                    f"label must be -1, 0 or +1, got {label_s!r}", i
                ) from None
            examples.append(
                LabeledExample(tuple(preprocess(text, stopwords, cues)), target, label)
            )
    return examples


def write_labeled(path: str | Path, rows: Iterable[tuple[str, str, int]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for text, target, label in rows:
            fh.write(f"{text}\t{target}\t{label:+d}\n" if label else f"{text}\t{target}\t0\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# Model persistence (exact integer counts; likelihoods are recomputed).


def save_model(model: NBModel, path: str | Path) -> None:
    payload = {
        "labels": [int(l) for l in LABELS],
        "word_counts": {str(int(l)): dict(model.word_counts[l]) for l in LABELS},
        "label_doc_counts": {str(int(l)): model.label_doc_counts[l] for l in LABELS},
        "uniform_priors": model.uniform_priors,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)


def load_model(path: str | Path) -> NBModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    word_counts = {
        SentimentLabel(int(k)): Counter(v) for k, v in payload["word_counts"].items()
    }
    doc_counts = {
        SentimentLabel(int(k)): v for k, v in payload["label_doc_counts"].items()
    }
    return NBModel(word_counts, doc_counts, payload.get("uniform_priors", False))
