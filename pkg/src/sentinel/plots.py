"""Matplotlib renderings of the report tables. Raw data is always written separately."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CLASS_NAMES = ("non-suicidal", "suicidal")


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def confusion_heatmap(m, path):
    grid = np.array([[m.tn, m.fp], [m.fn, m.tp]])
    fig, ax = plt.subplots(figsize=(4, 3.5))
    ax.imshow(grid, cmap="Blues")
    for (i, j), v in np.ndenumerate(grid):
        ax.text(j, i, str(v), ha="center", va="center")
    ax.set_xticks([0, 1], CLASS_NAMES)
    ax.set_yticks([0, 1], CLASS_NAMES)
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    _save(fig, path)


def prediction_density(report, path):
    conf = np.array([p.confidence for _, _, p in report.per_example])
    flags = np.array(report.success_flags)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bins = np.linspace(0.5, 1.0, 26)
    for flag, name in ((1, "successful (+1)"), (-1, "failed (-1)")):
        sel = conf[flags == flag]
        if len(sel):
            ax.hist(sel, bins=bins, density=True, alpha=0.6, label=f"{name}, n={len(sel)}")
    ax.set_xlabel("confidence")
    ax.set_ylabel("density")
    ax.legend()
    _save(fig, path)


def class_distribution(class_counts, path):
    fig, ax = plt.subplots(figsize=(4, 3.5))
    ax.bar(CLASS_NAMES, [class_counts.get(0, 0), class_counts.get(1, 0)], color=["tab:blue", "tab:red"])
    ax.set_ylabel("posts")
    _save(fig, path)


def top_words(pairs, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    words = [w for w, _ in pairs][::-1]
    ax.barh(words, [c for _, c in pairs][::-1])
    ax.set_xlabel("occurrences")
    _save(fig, path)


def word_count_histogram(hist, path, cutoff=None):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if hist:
        starts, counts = zip(*hist)
        width = starts[1] - starts[0] if len(starts) > 1 else 10
        ax.bar(starts, counts, width=width, align="edge")
    if cutoff:
        ax.axvline(cutoff, color="tab:red", linestyle="--", label=f"{cutoff} words")
        ax.legend()
    ax.set_xlabel("words per post")
    ax.set_ylabel("posts")
    _save(fig, path)


def source_breakdown(tally, path):
    sids = list(tally.sources)
    kept_s = [tally.sources[s].kept_suicidal for s in sids]
    kept_n = [tally.sources[s].kept_non_suicidal for s in sids]
    dropped = [tally.sources[s].discarded + tally.sources[s].malformed for s in sids]
    x = np.arange(len(sids))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(x - 0.25, kept_s, 0.25, label="suicidal")
    ax.bar(x, kept_n, 0.25, label="non-suicidal")
    ax.bar(x + 0.25, dropped, 0.25, label="dropped")
    ax.set_xticks(x, sids)
    ax.legend()
    _save(fig, path)


def split_counts(counts, path):
    parts = list(counts)
    x = np.arange(len(parts))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(x - 0.2, [counts[p]["non_suicidal"] for p in parts], 0.4, label="non-suicidal")
    ax.bar(x + 0.2, [counts[p]["suicidal"] for p in parts], 0.4, label="suicidal")
    ax.set_xticks(x, parts)
    ax.legend()
    _save(fig, path)
