"""TF-IDF features with an L2-regularized logistic regression on top."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.special import expit, log_expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_binary_target, check_both_classes, check_texts
from ..exceptions import ContractError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineConfig:
    ngram_range: tuple[int, int] = (1, 2)
    min_document_frequency: int = 2
    regularization_strength: float = 1.0
    convergence_tolerance: float = 1e-6
    max_iterations: int = 1000

    def __post_init__(self):
        lo, hi = self.ngram_range
        if not (0 < lo <= hi):
            raise ContractError(f"bad ngram_range {self.ngram_range}")
        if min(self.min_document_frequency, self.regularization_strength,
               self.convergence_tolerance, self.max_iterations) <= 0:
            raise ContractError("baseline settings must all be positive")


def ngrams(text: str, ngram_range=(1, 2)) -> list[str]:
    tokens = text.split()
    lo, hi = ngram_range
    out = []
    for n in range(lo, hi + 1):
        out.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return out


class TfidfLogisticClassifier(ClassifierMixin, BaseEstimator):
    """Linear baseline over cleaned text.

    Term weights are raw counts times smoothed inverse document frequency
    ``ln((1 + n) / (1 + df)) + 1``, L2-normalized per document. The
    classifier minimizes ``0.5 * ||w||^2 + C * sum(logloss)`` with an
    unpenalized intercept using L-BFGS.
    """

    def __init__(self, ngram_range=(1, 2), min_df=2, C=1.0, tol=1e-6, max_iter=1000):
        self.ngram_range = ngram_range
        self.min_df = min_df
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    @classmethod
    def from_config(cls, config: BaselineConfig) -> "TfidfLogisticClassifier":
        return cls(
            ngram_range=tuple(config.ngram_range),
            min_df=config.min_document_frequency,
            C=config.regularization_strength,
            tol=config.convergence_tolerance,
            max_iter=config.max_iterations,
        )

    def _features(self, texts):
        rows, cols, vals = [], [], []
        vocab = self.vocabulary_
        for r, text in enumerate(texts):
            counts = Counter(g for g in ngrams(text, self.ngram_range) if g in vocab)
            for g, c in counts.items():
                rows.append(r)
                cols.append(vocab[g])
                vals.append(c)
        X = sp.csr_matrix(
            (np.asarray(vals, dtype=np.float64), (rows, cols)),
            shape=(len(texts), len(vocab)),
        )
        X = X @ sp.diags(self.idf_)
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        norms[norms == 0] = 1.0
        return sp.csr_matrix(sp.diags(1.0 / norms) @ X)

    def fit(self, X, y):
        texts = check_texts(X, allow_empty_list=False)
        y = check_binary_target(y, len(texts))
        check_both_classes(y)
        BaselineConfig(tuple(self.ngram_range), self.min_df, self.C, self.tol, self.max_iter)

        df = Counter()
        for text in texts:
            df.update(set(ngrams(text, self.ngram_range)))
        terms = sorted(g for g, c in df.items() if c >= self.min_df)
        self.vocabulary_ = {g: i for i, g in enumerate(terms)}
        n = len(texts)
        self.idf_ = np.array([np.log((1 + n) / (1 + df[g])) + 1.0 for g in terms], dtype=np.float64)
        Xf = self._features(texts)

        sign = np.where(y == 1, 1.0, -1.0)
        C = float(self.C)
        d = Xf.shape[1]

        def objective(theta):
            w, b = theta[:d], theta[d]
            z = Xf @ w + b
            margin = sign * z
            loss = 0.5 * w @ w - C * log_expit(margin).sum()
            # d/dz of -log(sigmoid(s z)) is -s * sigmoid(-s z)
            g = -C * sign * expit(-margin)
            grad = np.empty_like(theta)
            grad[:d] = w + Xf.T @ g
            grad[d] = g.sum()
            return loss, grad

        res = minimize(
            objective,
            np.zeros(d + 1),
            jac=True,
            method="L-BFGS-B",
            options={"gtol": self.tol, "maxiter": self.max_iter, "ftol": 0.0},
        )
        self.coef_ = res.x[:d].copy()
        self.intercept_ = float(res.x[d])
        self.n_iter_ = int(res.nit)
        self.converged_ = bool(np.max(np.abs(res.jac)) <= self.tol) if d else True
        if not self.converged_:
            logger.warning("logistic fit stopped after %d iterations: %s", res.nit, res.message)
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        return self._features(check_texts(X)) @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p1 = expit(self.decision_function(X))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        proba = self.predict_proba(X)
        # argmax with ties resolved toward class 0
        return (proba[:, 1] > proba[:, 0]).astype(np.int64)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.string = True
        return tags
