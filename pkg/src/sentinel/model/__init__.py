"""Binary classifiers, single-text prediction and model persistence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptyTextError
from ..summarize import SummaryConfig, recursive_summarize
from ..textprep import CleanConfig, normalize_text
from .baseline import BaselineConfig, TfidfLogisticClassifier
from .persist import load_model, persist_model
from .transformer import (
    DEFAULT_CHECKPOINT,
    ElectraTextClassifier,
    FinetuneConfig,
    TransformerConfig,
    finetune_transformer,
)

LABEL_NAMES = {0: "non_suicidal", 1: "suicidal"}


@dataclass(frozen=True)
class Prediction:
    label: int
    confidence: float
    raw_scores: tuple[float, float]

    @classmethod
    def from_proba(cls, proba) -> "Prediction":
        p0, p1 = float(proba[0]), float(proba[1])
        label = 1 if p1 > p0 else 0
        return cls(label, max(p0, p1), (p0, p1))

    @property
    def suicidal_probability(self) -> float:
        return self.raw_scores[1]

    def checkpoint_style(self) -> str:
        """Render as ``LABEL_<k>: <confidence>``."""
        return f"LABEL_{self.label}: {self.confidence!r}"


def prepare_text(text: str, preprocess: bool = True, clean_config: CleanConfig | None = None,
                 summary_config: SummaryConfig | None = None) -> str:
    """Summarize and normalize ``text``; raises :class:`EmptyTextError` if nothing is left."""
    if preprocess:
        text = normalize_text(recursive_summarize(text, summary_config), clean_config)
    if not text.strip():
        raise EmptyTextError("text is empty after normalization")
    return text


def predict(model, text: str, preprocess: bool = True, clean_config: CleanConfig | None = None,
            summary_config: SummaryConfig | None = None) -> Prediction:
    cleaned = prepare_text(text, preprocess, clean_config, summary_config)
    return Prediction.from_proba(model.predict_proba([cleaned])[0])


def predict_batch(model, texts, preprocess: bool = True, clean_config=None, summary_config=None):
    """Predict many texts in one model call.

    Returns one entry per input: a :class:`Prediction`, or the
    :class:`EmptyTextError` raised while preparing that text.
    """
    out: list = [None] * len(texts)
    ready, where = [], []
    for i, t in enumerate(texts):
        try:
            ready.append(prepare_text(t, preprocess, clean_config, summary_config))
            where.append(i)
        except EmptyTextError as exc:
            out[i] = exc
    if ready:
        proba = np.asarray(model.predict_proba(ready))
        for i, row in zip(where, proba):
            out[i] = Prediction.from_proba(row)
    return out


__all__ = [
    "BaselineConfig",
    "DEFAULT_CHECKPOINT",
    "ElectraTextClassifier",
    "FinetuneConfig",
    "LABEL_NAMES",
    "Prediction",
    "TfidfLogisticClassifier",
    "TransformerConfig",
    "finetune_transformer",
    "load_model",
    "persist_model",
    "predict",
    "predict_batch",
    "prepare_text",
]
