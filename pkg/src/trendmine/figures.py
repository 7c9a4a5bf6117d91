"""Matplotlib rendering of report figures to files.

Trend computation stays plot-free; this module draws from the computed
series/histograms only, writing PNGs next to the delimited output.  The
PNG ``Software`` text chunk is suppressed and provenance goes into the
``Description`` chunk, so identical runs produce identical bytes.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.dates import AutoDateLocator, ConciseDateFormatter

from .lda import TopicReport
from .trends import Histogram, TrendSeries

_FIGSIZE = (8.0, 4.5)


def _save(fig, path: Path, meta: Mapping) -> Path:
    description = " ".join(f"{k}={v}" for k, v in sorted(meta.items()))
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata={"Software": None, "Description": description})
    plt.close(fig)
    return path


def _date_axis(ax) -> None:
    locator = AutoDateLocator()
    ax.xaxis.set_major_locator(locator)
    ax.xaxis.set_major_formatter(ConciseDateFormatter(locator))
    ax.grid(True, alpha=0.3)


def plot_series(
    series_list: Sequence[TrendSeries],
    path: str | Path,
    meta: Mapping,
    title: str,
    ylabel: str = "count",
    peaks: Sequence[date] = (),
) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for series in series_list:
        ax.plot(series.days(), series.values(), marker=".", label=series.label)
    if peaks:
        by_day = {d: v for s in series_list for d, v in s.points}
        ax.scatter(
            list(peaks),
            [by_day.get(d, 0.0) for d in peaks],
            color="crimson",
            zorder=3,
            label="peaks",
        )
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    if len(series_list) > 1 or peaks:
        ax.legend()
    _date_axis(ax)
    fig.autofmt_xdate()
    return _save(fig, Path(path), meta)


def plot_histogram(
    histogram: Histogram, path: str | Path, meta: Mapping, title: str
) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    keys = [b.key for b in histogram.bins]
    shares = [b.share for b in histogram.bins]
    ax.barh(range(len(keys) - 1, -1, -1), shares, tick_label=list(reversed(keys)))
    ax.set_title(title)
    ax.set_xlabel("share (%)")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    return _save(fig, Path(path), meta)


def plot_topics(report: TopicReport, path: str | Path, meta: Mapping) -> Path:
    k = len(report.topics)
    fig, axes = plt.subplots(1, k, figsize=(3.0 * k, 4.5), squeeze=False)
    for i, topic in enumerate(report.topics):
        ax = axes[0][i]
        words = [w for w, _ in topic]
        probs = [p for _, p in topic]
        ax.barh(range(len(words) - 1, -1, -1), probs, tick_label=list(reversed(words)))
        ax.set_title(f"topic {i}")
        ax.tick_params(labelsize=8)
    fig.suptitle("topic top words")
    fig.tight_layout()
    return _save(fig, Path(path), meta)


def plot_poll_agreement(
    poll_series: Mapping[str, TrendSeries], path: str | Path, meta: Mapping
) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, series in sorted(poll_series.items()):
        ax.plot(series.days(), series.values(), marker=".", label=label)
    ax.set_title("poll favor averages by end date")
    ax.set_ylabel("favor (%)")
    ax.legend()
    _date_axis(ax)
    fig.autofmt_xdate()
    return _save(fig, Path(path), meta)
