"""Topic extraction via collapsed Gibbs sampling.

Each document is one preprocessed token list.  The sampler resamples every
token's topic in corpus order from the standard collapsed conditional

    p(z = k) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)

and reports each topic's distribution from the final sample only, with no
burn-in averaging.  All randomness flows from one seeded generator created
at initialization, so runs are reproducible bit for bit.

The per-token loop is JIT-compiled when numba is importable and falls back
to the identical pure-Python loop otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import EmptyCorpus, TopicIndexOutOfRange, ValidationError


@dataclass(frozen=True)
class LdaConfig:
    k: int = 5
    alpha: float | None = None  # None -> 50 / k
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0
    top_n: int = 15
    min_token_count: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.beta <= 0:
            raise ValidationError(f"beta must be positive, got {self.beta}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if self.top_n < 1:
            raise ValidationError(f"top_n must be >= 1, got {self.top_n}")

    @property
    def resolved_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.k


def _sweep_kernel(doc_ids, word_ids, z, n_dk, n_kw, n_k, alpha, beta, uniforms):
    k_topics = n_kw.shape[0]
    v_beta = n_kw.shape[1] * beta
    weights = np.empty(k_topics)
    for i in range(doc_ids.shape[0]):
        d = doc_ids[i]
        w = word_ids[i]
        old = z[i]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for k in range(k_topics):
            wt = (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
            weights[k] = wt
            total += wt
        threshold = uniforms[i] * total
        acc = 0.0
        new = k_topics - 1
        for k in range(k_topics):
            acc += weights[k]
            if threshold < acc:
                new = k
                break
        z[i] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


try:
    from numba import njit

    _sweep_kernel = njit(cache=True)(_sweep_kernel)
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass


class LdaState:
    """Sampler state: assignments, count matrices, vocabulary, generator."""

    def __init__(self, docs: Sequence[Sequence[str]], config: LdaConfig):
        kept: list[list[str]] = []
        dropped = 0
        for doc in docs:
            if len(doc) > 0:
                kept.append(list(doc))
            else:
                dropped += 1
        if config.min_token_count > 1:
            counts: dict[str, int] = {}
            for doc in kept:
                for tok in doc:
                    counts[tok] = counts.get(tok, 0) + 1
            filtered = []
            for doc in kept:
                doc = [t for t in doc if counts[t] >= config.min_token_count]
                if doc:
                    filtered.append(doc)
                else:
                    dropped += 1
            kept = filtered
        if not kept:
            raise EmptyCorpus("no non-empty documents after preprocessing")

        self.config = config
        self.dropped_docs = dropped
        self.vocab: list[str] = []
        self.vocab_index: dict[str, int] = {}
        for doc in kept:
            for tok in doc:
                if tok not in self.vocab_index:
                    self.vocab_index[tok] = len(self.vocab)
                    self.vocab.append(tok)
        self.docs = [
            np.array([self.vocab_index[t] for t in doc], dtype=np.int64)
            for doc in kept
        ]
        self.doc_ids = np.concatenate(
            [np.full(len(doc), d, dtype=np.int64) for d, doc in enumerate(self.docs)]
        )
        self.word_ids = np.concatenate(self.docs)

        k = config.k
        self.rng = np.random.default_rng(config.seed % 2**63)
        self.z = self.rng.integers(0, k, size=self.word_ids.shape[0], dtype=np.int64)
        self.n_dk = np.zeros((len(self.docs), k), dtype=np.int64)
        self.n_kw = np.zeros((k, len(self.vocab)), dtype=np.int64)
        self.n_k = np.zeros(k, dtype=np.int64)
        np.add.at(self.n_dk, (self.doc_ids, self.z), 1)
        np.add.at(self.n_kw, (self.z, self.word_ids), 1)
        np.add.at(self.n_k, self.z, 1)

    @property
    def n_tokens(self) -> int:
        return int(self.word_ids.shape[0])

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def check_invariants(self) -> None:
        """Count-conservation identities; cheap enough to run every sweep."""
        doc_lengths = np.array([len(d) for d in self.docs])
        if not np.array_equal(self.n_dk.sum(axis=1), doc_lengths):
            raise AssertionError("doc-topic counts do not sum to doc lengths")
        if not np.array_equal(self.n_kw.sum(axis=1), self.n_k):
            raise AssertionError("topic-word counts do not sum to topic totals")
        if int(self.n_k.sum()) != self.n_tokens:
            raise AssertionError("topic totals do not sum to the token count")
        if (self.n_dk < 0).any() or (self.n_kw < 0).any() or (self.n_k < 0).any():
            raise AssertionError("negative count")

    def phi(self) -> np.ndarray:
        """Topic-word distributions, rows summing to one over the vocabulary."""
        beta = self.config.beta
        return (self.n_kw + beta) / (self.n_k + self.vocab_size * beta)[:, None]

    def theta(self) -> np.ndarray:
        """Document-topic distributions, rows summing to one."""
        alpha = self.config.resolved_alpha
        lengths = self.n_dk.sum(axis=1, keepdims=True)
        return (self.n_dk + alpha) / (lengths + self.config.k * alpha)


def init_state(docs: Sequence[Sequence[str]], config: LdaConfig) -> LdaState:
    """Assign every token a uniform random topic and build count matrices.

    Empty documents are dropped and counted on ``state.dropped_docs``.
    """
    return LdaState(docs, config)


def gibbs_sweep(state: LdaState, config: LdaConfig | None = None, check: bool = False) -> LdaState:
    """One full resampling pass over every token, in corpus order."""
    cfg = config if config is not None else state.config
    uniforms = state.rng.random(state.n_tokens)
    _sweep_kernel(
        state.doc_ids,
        state.word_ids,
        state.z,
        state.n_dk,
        state.n_kw,
        state.n_k,
        cfg.resolved_alpha,
        cfg.beta,
        uniforms,
    )
    if check:
        state.check_invariants()
    return state


@dataclass(frozen=True)
class TopicReport:
    """Top words per topic with their probabilities, plus run metadata."""

    topics: tuple[tuple[tuple[str, float], ...], ...]
    k: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    top_n: int
    vocab_size: int
    doc_count: int
    dropped_docs: int

    def to_json_dict(self) -> dict:
        return {
            "config": {
                "k": self.k,
                "alpha": self.alpha,
                "beta": self.beta,
                "iterations": self.iterations,
                "seed": self.seed,
                "top_n": self.top_n,
            },
            "metadata": {
                "vocab_size": self.vocab_size,
                "doc_count": self.doc_count,
                "dropped_docs": self.dropped_docs,
            },
            "topics": [
                [{"word": w, "probability": p} for w, p in topic]
                for topic in self.topics
            ],
        }


def top_words(state: LdaState, k: int, n: int) -> list[str]:
    """The ``n`` highest-probability tokens of topic ``k``; ties go in
    lexicographic order.  Returns the whole vocabulary when it is smaller."""
    if not 0 <= k < state.config.k:
        raise TopicIndexOutOfRange(f"topic {k} outside [0, {state.config.k})")
    return [w for w, _ in _ranked_topic(state, k)[:n]]


def _ranked_topic(state: LdaState, k: int) -> list[tuple[str, float]]:
    row = state.phi()[k]
    ranked = sorted(zip(state.vocab, row), key=lambda wp: (-wp[1], wp[0]))
    return [(w, float(p)) for w, p in ranked]


def build_report(state: LdaState) -> TopicReport:
    cfg = state.config
    topics = tuple(
        tuple(_ranked_topic(state, k)[: cfg.top_n]) for k in range(cfg.k)
    )
    return TopicReport(
        topics=topics,
        k=cfg.k,
        alpha=cfg.resolved_alpha,
        beta=cfg.beta,
        iterations=cfg.iterations,
        seed=cfg.seed,
        top_n=cfg.top_n,
        vocab_size=state.vocab_size,
        doc_count=state.n_docs,
        dropped_docs=state.dropped_docs,
    )


def run(
    docs: Sequence[Sequence[str]], config: LdaConfig, check: bool = False
) -> tuple[LdaState, TopicReport]:
    """Initialize, run the configured number of sweeps, and report."""
    state = init_state(docs, config)
    for _ in range(config.iterations):
        gibbs_sweep(state, config, check=check)
    return state, build_report(state)
