"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import ContractError


def check_texts(X, *, allow_empty_list: bool = True) -> list[str]:
    """Return ``X`` as a list of ``str``.

    Accepts any 1-d iterable of strings (list, tuple, numpy array, pandas
    Series). A bare string is rejected since it would be iterated character
    by character.
    """
    if isinstance(X, (str, bytes)):
        raise ContractError("expected a sequence of texts, got a single string")
    if hasattr(X, "ndim") and getattr(X, "ndim") != 1:
        raise ContractError(f"expected a 1-d sequence of texts, got ndim={X.ndim}")
    texts = list(X)
    for i, t in enumerate(texts):
        if not isinstance(t, str):
            raise ContractError(f"text at position {i} is {type(t).__name__}, not str")
    if not texts and not allow_empty_list:
        raise ContractError("no texts given")
    return texts


def check_binary_target(y, n_samples: int | None = None) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ContractError(f"labels must be 1-d, got shape {y.shape}")
    if n_samples is not None and len(y) != n_samples:
        raise ContractError(f"{n_samples} texts but {len(y)} labels")
    bad = set(np.unique(y).tolist()) - {0, 1}
    if bad:
        raise ContractError(f"labels must be 0 or 1, found {sorted(bad)}")
    return y.astype(np.int64)


def check_both_classes(y: np.ndarray) -> None:
    present = set(np.unique(y).tolist())
    for cls, name in ((0, "non-suicidal (0)"), (1, "suicidal (1)")):
        if cls not in present:
            raise ContractError(f"training data has no {name} examples")
