"""Outlier filtering, corpus statistics and the stratified train/validation/test split."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import ContractError
from .summarize import word_count
from .textprep import ProcessedRecord

DEFAULT_RATIOS = (0.8, 0.1, 0.1)
DEFAULT_SEED = 42
PART_NAMES = ("train", "validation", "test")
PROCESSED_COLUMNS = ("text", "summary", "cleaned", "label")


def filter_outliers(corpus, max_words: int = 430):
    """Drop records whose raw text has more than ``max_words`` words."""
    return [r for r in corpus if word_count(r.text) <= max_words]


@dataclass
class CorpusStats:
    class_counts: dict[int, int]
    word_count_percentiles: dict[float, int]
    top_words: list[tuple[str, int]]
    size: int = 0


def percentile_nearest_rank(sorted_values: Sequence[int], p: float) -> int:
    """Smallest value ``w`` such that at least ``p`` percent of values are <= ``w``."""
    n = len(sorted_values)
    if not n:
        raise ContractError("percentile of an empty sample")
    rank = max(1, math.ceil(p / 100 * n - 1e-9))
    return sorted_values[min(rank, n) - 1]


def corpus_stats(corpus, k: int = 20, percentiles=(50, 90, 95, 99)) -> CorpusStats:
    if k <= 0:
        raise ContractError(f"k must be positive, got {k}")
    counts = Counter(r.label for r in corpus)
    lengths = sorted(word_count(r.text) for r in corpus)
    pct = {p: percentile_nearest_rank(lengths, p) for p in percentiles} if lengths else {}
    words = Counter()
    for r in corpus:
        cleaned = getattr(r, "cleaned", None)
        if cleaned:
            words.update(cleaned.split())
    top = sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return CorpusStats({c: counts.get(c, 0) for c in (0, 1)}, pct, top, len(corpus))


def word_count_histogram(corpus, bin_width: int = 10) -> list[tuple[int, int]]:
    """(bin start, count) pairs over raw word counts."""
    bins = Counter(word_count(r.text) // bin_width * bin_width for r in corpus)
    return sorted(bins.items())


@dataclass
class CorpusSplit:
    train: list
    validation: list
    test: list
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    seed: int = DEFAULT_SEED
    stratified: bool = True
    corpus_hash: str = ""

    def parts(self) -> dict[str, list]:
        return {"train": self.train, "validation": self.validation, "test": self.test}

    def counts(self) -> dict[str, dict[str, int]]:
        out = {}
        for name, part in self.parts().items():
            c = Counter(r.label for r in part)
            out[name] = {"total": len(part), "non_suicidal": c.get(0, 0), "suicidal": c.get(1, 0)}
        return out

    def manifest(self) -> dict:
        return {
            "seed": self.seed,
            "ratios": list(self.ratios),
            "stratified": self.stratified,
            "counts": self.counts(),
            "corpus_sha256": self.corpus_hash,
        }


def _largest_remainder(total: int, weights: Sequence[float]) -> list[int]:
    """Integers summing to ``total`` proportional to ``weights``."""
    wsum = float(sum(weights))
    exact = [total * w / wsum if wsum else 0.0 for w in weights]
    base = [math.floor(x + 1e-9) for x in exact]
    short = total - sum(base)
    order = sorted(range(len(weights)), key=lambda j: (-(exact[j] - base[j]), j))
    for j in order[:short]:
        base[j] += 1
    return base


def part_sizes(n: int, ratios: Sequence[float]) -> list[int]:
    return _largest_remainder(n, ratios)


def corpus_hash(corpus) -> str:
    h = hashlib.sha256()
    for r in corpus:
        cleaned = getattr(r, "cleaned", "")
        h.update(f"{r.text}\x1f{cleaned}\x1f{r.label}\x1e".encode("utf-8"))
    return h.hexdigest()


def check_ratios(ratios) -> tuple[float, float, float]:
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ContractError(f"need three non-negative ratios, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ContractError(f"ratios must sum to 1, got {sum(ratios)!r}")
    return ratios


def split_corpus(corpus, ratios=DEFAULT_RATIOS, seed: int = DEFAULT_SEED, stratified: bool = True) -> CorpusSplit:
    """Seeded shuffle-and-cut split.

    Part sizes are fixed globally by largest-remainder rounding of
    ``ratios * N``. In stratified mode each class is shuffled on its own and
    its share of every part is rounded so the class totals and the part
    totals both come out exact; the parts are then shuffled again so classes
    interleave.
    """
    ratios = check_ratios(ratios)
    corpus = list(corpus)
    n = len(corpus)
    if not n:
        raise ContractError("cannot split an empty corpus")
    sizes = part_sizes(n, ratios)
    rng = np.random.default_rng(seed)
    parts: list[list[int]] = [[], [], []]

    if stratified:
        by_class: dict[int, list[int]] = {}
        for i, r in enumerate(corpus):
            by_class.setdefault(r.label, []).append(i)
        remaining = list(sizes)
        labels = sorted(by_class)
        left = n
        for c in labels:
            idx = by_class[c]
            if c == labels[-1]:
                quota = remaining
            else:
                # each class takes its proportional share of what is still unassigned
                quota = _largest_remainder(len(idx), [len(idx) * rem / left for rem in remaining])
            perm = [idx[j] for j in rng.permutation(len(idx))]
            start = 0
            for p, q in enumerate(quota):
                parts[p].extend(perm[start : start + q])
                start += q
            remaining = [rem - q for rem, q in zip(remaining, quota)]
            left -= len(idx)
        parts = [[p[j] for j in rng.permutation(len(p))] for p in parts]
    else:
        perm = rng.permutation(n).tolist()
        a, b = sizes[0], sizes[0] + sizes[1]
        parts = [perm[:a], perm[a:b], perm[b:]]

    return CorpusSplit(
        *([corpus[i] for i in p] for p in parts),
        ratios=ratios,
        seed=seed,
        stratified=stratified,
        corpus_hash=corpus_hash(corpus),
    )


def write_processed(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROCESSED_COLUMNS)
        for r in records:
            w.writerow((r.text, r.summary, r.cleaned, r.label))


def read_processed(path) -> list[ProcessedRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            ProcessedRecord(row["text"], row["summary"], row["cleaned"], int(row["label"]))
            for row in csv.DictReader(fh)
        ]


def write_split(split: CorpusSplit, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in split.parts().items():
        write_processed(part, out / f"{name}.csv")
    manifest = out / "split_manifest.json"
    manifest.write_text(json.dumps(split.manifest(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def read_split(in_dir) -> CorpusSplit:
    d = Path(in_dir)
    meta = json.loads((d / "split_manifest.json").read_text(encoding="utf-8"))
    parts = [read_processed(d / f"{name}.csv") for name in PART_NAMES]
    return CorpusSplit(*parts, ratios=tuple(meta["ratios"]), seed=meta["seed"],
                       stratified=meta["stratified"], corpus_hash=meta["corpus_sha256"])
