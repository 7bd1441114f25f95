import csv
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import count_confusion, naive_metrics
from sentinel.evaluate import (
    REFERENCE_FINETUNE_METRICS,
    ConfusionMatrix,
    compute_metrics,
    confusion,
    evaluation_report,
    reproduction_table,
)
from sentinel.exceptions import ContractError
from sentinel.textprep import ProcessedRecord


def test_confusion_direct_count():
    assert confusion([1, 1, 0, 0], [1, 0, 0, 1]) == ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)
    m = confusion([1, 0, 1], [1, 0, 1])
    assert m.fp == m.fn == 0


def test_confusion_errors():
    with pytest.raises(ContractError):
        confusion([1, 0], [1])
    with pytest.raises(ContractError):
        confusion([], [])
    with pytest.raises(ContractError):
        compute_metrics(ConfusionMatrix(0, 0, 0, 0))


def test_confusion_matches_counting_oracle():
    rng = random.Random(11)
    golds = [rng.randint(0, 1) for _ in range(500)]
    preds = [rng.randint(0, 1) for _ in range(500)]
    m = confusion(golds, preds)
    assert (m.tp, m.fp, m.tn, m.fn) == count_confusion(golds, preds)


def test_perfect_classifier():
    m = compute_metrics(ConfusionMatrix(tp=50, fp=0, tn=50, fn=0))
    assert (m.accuracy, m.precision, m.recall, m.f1, m.error_rate) == (1.0, 1.0, 1.0, 1.0, 0.0)


def test_spot_values():
    m = compute_metrics(ConfusionMatrix(tp=9, fp=1, tn=8, fn=2))
    assert m.accuracy == pytest.approx(0.85, abs=1e-12)
    assert m.precision == pytest.approx(0.9, abs=1e-12)
    assert m.recall == pytest.approx(9 / 11, abs=1e-12)
    assert m.f1 == pytest.approx(6 / 7, abs=1e-12)


def test_zero_denominators():
    m = compute_metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0))
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)


def test_majority_predictor_on_reference_balance():
    non_suicidal, suicidal = 144_993, 117_325
    m = compute_metrics(ConfusionMatrix(tp=0, fp=0, tn=non_suicidal, fn=suicidal))
    assert m.accuracy == pytest.approx(0.553, abs=5e-4)
    assert m.error_rate == 1 - m.accuracy


def test_reference_metrics_recorded():
    assert REFERENCE_FINETUNE_METRICS["accuracy"] == 0.939432
    assert REFERENCE_FINETUNE_METRICS["f1"] == 0.932672


pairs = st.integers(1, 1000).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                        st.lists(st.integers(0, 1), min_size=n, max_size=n)))


@settings(max_examples=100, deadline=None)
@given(pairs)
def test_metrics_match_naive_recount(gp):
    golds, preds = gp
    got = compute_metrics(confusion(golds, preds))
    ref = naive_metrics(golds, preds)
    for key, value in ref.items():
        assert abs(getattr(got, key) - value) <= 1e-12
    assert got.error_rate == 1 - got.accuracy


@settings(max_examples=100, deadline=None)
@given(pairs)
def test_rational_identities_and_f1_bounds(gp):
    golds, preds = gp
    m = confusion(golds, preds)
    assert m.total == len(golds)
    met = compute_metrics(m)
    assert Fraction(m.tp + m.tn, m.total) == Fraction(met.accuracy).limit_denominator(m.total)
    if met.precision > 0 and met.recall > 0:
        assert min(met.precision, met.recall) - 1e-12 <= met.f1 <= max(met.precision, met.recall) + 1e-12


@settings(max_examples=100, deadline=None)
@given(pairs)
def test_label_swap_symmetry(gp):
    golds, preds = gp
    m = compute_metrics(confusion(golds, preds))
    swapped = compute_metrics(confusion([1 - g for g in golds], [1 - p for p in preds]))
    # the swapped positive class is the original negative class
    neg_precision = naive_metrics([1 - g for g in golds], [1 - p for p in preds])["precision"]
    neg_recall = naive_metrics([1 - g for g in golds], [1 - p for p in preds])["recall"]
    assert swapped.accuracy == m.accuracy
    assert swapped.precision == pytest.approx(neg_precision, abs=1e-12)
    assert swapped.recall == pytest.approx(neg_recall, abs=1e-12)


class Oracle:
    """Scores every text by a lookup of its gold label."""

    def __init__(self, gold):
        self.gold = gold

    def predict_proba(self, texts):
        return [[0.0, 1.0] if self.gold[t] else [1.0, 0.0] for t in texts]


def test_perfect_toy_report(tmp_path):
    test = [ProcessedRecord(f"post {i}", f"post {i}", f"word{i} post", i % 2) for i in range(20)]
    model = Oracle({r.cleaned: r.label for r in test})
    report = evaluation_report(model, test, tmp_path)
    assert report.error_rate == 0 and report.success_flags == [1] * 20
    assert len(report.per_example) == 20
    for name in ["metrics.txt", "reproduction.txt", "confusion_matrix.csv", "predictions.csv",
                 "prediction_density.csv", "class_distribution.csv", "top_words.csv", "summary.json",
                 "confusion_matrix.png", "prediction_density.png", "class_distribution.png", "top_words.png"]:
        assert (tmp_path / name).stat().st_size > 0, name
    with open(tmp_path / "prediction_density.csv", newline="") as fh:
        assert {row["outcome"] for row in csv.DictReader(fh)} == {"1"}
    with open(tmp_path / "predictions.csv", newline="") as fh:
        assert next(csv.DictReader(fh))["prediction"] == "LABEL_0: 1.0"
    assert "error_rate=0.0" in (tmp_path / "metrics.txt").read_text()


def test_failures_flagged_minus_one(tmp_path):
    test = [ProcessedRecord("a", "a", "a", 1), ProcessedRecord("b", "b", "b", 0)]
    model = Oracle({"a": 0, "b": 0})
    report = evaluation_report(model, test)
    assert report.success_flags == [-1, 1] and report.error_rate == 0.5


def test_reproduction_table_shows_matrix_and_reference():
    test = [ProcessedRecord("a", "a", "a", 1), ProcessedRecord("b", "b", "b", 0)]
    text = reproduction_table(evaluation_report(Oracle({"a": 1, "b": 0}), test))
    assert "TP=1 FP=0 TN=1 FN=0" in text and "0.939432" in text and "0.932672" in text


def test_empty_test_split():
    with pytest.raises(ContractError):
        evaluation_report(Oracle({}), [])
