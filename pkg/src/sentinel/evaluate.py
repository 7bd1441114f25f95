"""Confusion matrix, metrics and the evaluation report directory."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import ContractError

# reference fine-tune results, the reproduction target
REFERENCE_FINETUNE_METRICS = {
    "accuracy": 0.939432,
    "recall": 0.937164,
    "precision": 0.928222,
    "f1": 0.932672,
    "error_rate": 0.0645,
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    error_rate: float


def confusion(golds: Sequence[int], preds: Sequence[int]) -> ConfusionMatrix:
    g = np.asarray(golds)
    p = np.asarray(preds)
    if g.shape != p.shape or g.ndim != 1:
        raise ContractError(f"golds and preds differ in shape: {g.shape} vs {p.shape}")
    if not len(g):
        raise ContractError("nothing to evaluate")
    return ConfusionMatrix(
        tp=int(np.sum((g == 1) & (p == 1))),
        fp=int(np.sum((g != 1) & (p == 1))),
        tn=int(np.sum((g != 1) & (p != 1))),
        fn=int(np.sum((g == 1) & (p != 1))),
    )


def compute_metrics(m: ConfusionMatrix) -> Metrics:
    """Standard binary metrics with suicidal as the positive class.

    Precision, recall and F1 are 0 when their denominators are 0.
    """
    if m.total <= 0:
        raise ContractError("empty confusion matrix")
    accuracy = (m.tp + m.tn) / m.total
    precision = m.tp / (m.tp + m.fp) if m.tp + m.fp else 0.0
    recall = m.tp / (m.tp + m.fn) if m.tp + m.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(accuracy, precision, recall, f1, 1.0 - accuracy)


@dataclass
class EvalReport:
    matrix: ConfusionMatrix
    metrics: Metrics
    per_example: list = field(default_factory=list)
    success_flags: list[int] = field(default_factory=list)

    @property
    def accuracy(self):
        return self.metrics.accuracy

    @property
    def precision(self):
        return self.metrics.precision

    @property
    def recall(self):
        return self.metrics.recall

    @property
    def f1(self):
        return self.metrics.f1

    @property
    def error_rate(self):
        return self.metrics.error_rate


def build_report(texts, golds, predictions) -> EvalReport:
    preds = [p.label for p in predictions]
    m = confusion(list(golds), preds)
    flags = [1 if g == p else -1 for g, p in zip(golds, preds)]
    return EvalReport(m, compute_metrics(m), list(zip(texts, golds, predictions)), flags)


def metrics_text(report: EvalReport) -> str:
    lines = [f"{k}={v!r}" for k, v in asdict(report.metrics).items()]
    lines += [f"{k}={v}" for k, v in asdict(report.matrix).items()]
    lines.append(f"total={report.matrix.total}")
    lines.append("# precision/recall/f1 are 0 when their denominator is 0")
    return "\n".join(lines) + "\n"


def reproduction_table(report: EvalReport) -> str:
    """Computed metrics and confusion matrix next to the reference fine-tune numbers."""
    rows = ["metric      computed    reference"]
    for k, ref in REFERENCE_FINETUNE_METRICS.items():
        rows.append(f"{k:<11} {getattr(report.metrics, k):<11.6f} {ref:.6f}")
    m = report.matrix
    rows.append(f"confusion   TP={m.tp} FP={m.fp} TN={m.tn} FN={m.fn} (total {m.total})")
    return "\n".join(rows) + "\n"


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def evaluation_report(model, test, out_dir=None, preprocess: bool = False, corpus=None, top_k: int = 20) -> EvalReport:
    """Predict every record of ``test`` and write the report artifacts.

    ``test`` holds processed records; their ``cleaned`` text is scored as-is
    unless ``preprocess`` is set. ``corpus`` (defaults to ``test``) feeds
    the class-distribution and frequent-word plots.
    """
    from .model import predict_batch
    from .exceptions import EmptyTextError

    test = list(test)
    if not test:
        raise ContractError("test split is empty")
    texts = [r.cleaned for r in test]
    preds = predict_batch(model, texts, preprocess=preprocess)
    for t, p in zip(texts, preds):
        if isinstance(p, EmptyTextError):
            raise ContractError(f"test record cannot be classified: {t!r}")
    report = build_report(texts, [r.label for r in test], preds)
    if out_dir is not None:
        write_report(report, out_dir, corpus if corpus is not None else test, top_k)
    return report


def write_report(report: EvalReport, out_dir, corpus, top_k: int = 20) -> Path:
    from .corpus import corpus_stats

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.txt").write_text(metrics_text(report), encoding="utf-8")
    (out / "reproduction.txt").write_text(reproduction_table(report), encoding="utf-8")
    m = report.matrix
    _write_rows(out / "confusion_matrix.csv", ["", "pred_non_suicidal", "pred_suicidal"],
                [["gold_non_suicidal", m.tn, m.fp], ["gold_suicidal", m.fn, m.tp]])
    _write_rows(
        out / "predictions.csv",
        ["text", "label", "prediction", "p_non_suicidal", "p_suicidal"],
        [(t, g, p.checkpoint_style(), repr(p.raw_scores[0]), repr(p.raw_scores[1]))
         for t, g, p in report.per_example],
    )
    _write_rows(out / "prediction_density.csv", ["outcome", "confidence"],
                [(f, repr(p.confidence)) for f, (_, _, p) in zip(report.success_flags, report.per_example)])
    stats = corpus_stats(corpus, k=top_k)
    _write_rows(out / "class_distribution.csv", ["label", "count"], sorted(stats.class_counts.items()))
    _write_rows(out / "top_words.csv", ["token", "count"], stats.top_words)
    (out / "summary.json").write_text(
        json.dumps({"metrics": asdict(report.metrics), "confusion": asdict(m)}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    from . import plots

    plots.confusion_heatmap(m, out / "confusion_matrix.png")
    plots.prediction_density(report, out / "prediction_density.png")
    plots.class_distribution(stats.class_counts, out / "class_distribution.png")
    plots.top_words(stats.top_words, out / "top_words.png")
    return out
