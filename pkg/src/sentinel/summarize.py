"""Extractive, frequency-scored summarization of long posts.

Posts of ``trigger_words`` words or more are condensed to at most
``max_words`` words by repeatedly keeping the sentences whose content
words are most frequent in the post.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_texts
from .exceptions import ContractError
from .textprep import default_stopwords, fold_accents

_SENTENCE_BREAK = re.compile(r"(?<=[.?!])\s+|\n+")
_CONTENT = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class SummaryConfig:
    trigger_words: int = 300
    min_words: int = 50
    max_words: int = 120
    max_depth: int = 5

    def __post_init__(self):
        if not 0 < self.min_words <= self.max_words < self.trigger_words:
            raise ContractError("need 0 < min_words <= max_words < trigger_words")
        if self.max_depth < 1:
            raise ContractError("max_depth must be >= 1")


def word_count(text: str) -> int:
    return len(text.split())


def split_sentences(text: str) -> list[str]:
    parts = (s.strip() for s in _SENTENCE_BREAK.split(text))
    return [" ".join(s.split()) for s in parts if s.strip()]


def _content_tokens(sentence: str, stop) -> list[str]:
    return [t for t in _CONTENT.findall(fold_accents(sentence).lower()) if t not in stop]


def score_sentences(sentences: list[str], stopwords=None) -> list[float]:
    """Mean max-normalized document frequency of each sentence's content words."""
    stop = default_stopwords() if stopwords is None else stopwords
    toks = [_content_tokens(s, stop) for s in sentences]
    freq = Counter(t for ts in toks for t in ts)
    top = max(freq.values(), default=0)
    if not top:
        return [0.0] * len(sentences)
    return [sum(freq[t] for t in ts) / (top * len(ts)) if ts else 0.0 for ts in toks]


def _summarize_pass(text: str, config: SummaryConfig) -> str:
    seen, sentences = set(), []
    for s in split_sentences(text):
        if s not in seen:
            seen.add(s)
            sentences.append(s)
    if not sentences:
        return ""
    scores = score_sentences(sentences)
    lengths = [word_count(s) for s in sentences]
    ranked = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))

    chosen: dict[int, str] = {}
    total = 0
    for i in ranked:
        if total + lengths[i] <= config.max_words:
            chosen[i] = sentences[i]
            total += lengths[i]
    if not chosen:
        # every sentence is over budget on its own; keep the best one whole
        best = ranked[0]
        return sentences[best]
    # the floor is met by taking the head of the best remaining sentence
    for i in ranked:
        if total >= config.min_words:
            break
        if i in chosen:
            continue
        room = config.max_words - total
        head = sentences[i].split()[:room]
        chosen[i] = " ".join(head)
        total += len(head)
    return " ".join(chosen[i] for i in sorted(chosen))


def summarize_once(text: str, config: SummaryConfig | None = None) -> str:
    """One extractive pass over a post of at least ``trigger_words`` words.

    Exact duplicate sentences are merged. Sentences are taken in score
    order while they fit the ``max_words`` budget, then emitted in their
    original order. If that leaves the summary under ``min_words``, the
    head of the next best sentence fills the remaining budget.
    """
    config = config or SummaryConfig()
    n = word_count(text)
    if n < config.trigger_words:
        raise ContractError(f"summarize_once needs >= {config.trigger_words} words, got {n}")
    return _summarize_pass(text, config)


def summarize_trace(text: str, config: SummaryConfig | None = None) -> tuple[str, int]:
    """Like :func:`recursive_summarize` but also returns the number of passes.

    Hard truncation counts as a pass.
    """
    config = config or SummaryConfig()
    if word_count(text) < config.trigger_words:
        return text, 0
    current, passes = text, 0
    while word_count(current) > config.max_words and passes < config.max_depth:
        nxt = _summarize_pass(current, config)
        passes += 1
        if nxt == current:
            break
        current = nxt
    if word_count(current) > config.max_words:
        current = " ".join(current.split()[: config.max_words])
        passes += 1
    return current, passes


def recursive_summarize(text: str, config: SummaryConfig | None = None) -> str:
    return summarize_trace(text, config)[0]


class RecursiveSummarizer(TransformerMixin, BaseEstimator):
    """Stateless transformer applying :func:`recursive_summarize` per text."""

    def __init__(self, trigger_words=300, min_words=50, max_words=120, max_depth=5):
        self.trigger_words = trigger_words
        self.min_words = min_words
        self.max_words = max_words
        self.max_depth = max_depth

    def fit(self, X, y=None):
        check_texts(X)
        self.config_ = SummaryConfig(self.trigger_words, self.min_words, self.max_words, self.max_depth)
        return self

    def transform(self, X):
        config = SummaryConfig(self.trigger_words, self.min_words, self.max_words, self.max_depth)
        return [recursive_summarize(t, config) for t in check_texts(X)]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        tags.input_tags.string = True
        return tags
