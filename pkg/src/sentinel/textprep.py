"""Text cleaning and lexical normalization.

The pipeline turns a post into the ``cleaned`` column: a space-joined
sequence of lowercase ASCII word tokens with stopwords removed and each
token reduced to its lemma (or stem).
"""

from __future__ import annotations

import enum
import functools
import os
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import simplemma
from nltk.stem import PorterStemmer
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_texts
from .exceptions import ContractError

_DATA = resources.files("sentinel") / "data"

_URL = re.compile(r"(?:[a-z][a-z0-9+.\-]*://|www\.)\S*")
_NON_LETTER = re.compile(r"[^a-z]+")
_WORD_RE = re.compile(r"^[a-z]+$")


class LexicalMode(str, enum.Enum):
    LEMMATIZE = "lemmatize"
    STEM = "stem"


def _data_lines(name: str) -> Iterable[str]:
    for line in (_DATA / name).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


@functools.lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(_data_lines("stopwords_en.txt"))


@functools.lru_cache(maxsize=None)
def default_lexicon() -> Mapping[str, int]:
    """Spell lexicon as token -> corpus frequency."""
    out = {}
    for line in _data_lines("lexicon_en.txt"):
        word, _, count = line.partition("\t")
        out[word] = int(count) if count else 1
    return out


@functools.lru_cache(maxsize=None)
def default_expansions() -> Mapping[tuple[str, ...], tuple[str, ...]]:
    out = {}
    for line in _data_lines("expansions_en.tsv"):
        phrase, repl = line.split("\t")
        out[tuple(phrase.split())] = tuple(repl.split())
    return out


def load_wordlist(path) -> frozenset[str]:
    """Read a one-token-per-line file (``#`` comments allowed)."""
    with open(path, encoding="utf-8") as fh:
        words = (ln.split("\t")[0].strip() for ln in fh)
        return frozenset(w for w in words if w and not w.startswith("#"))


@dataclass(frozen=True)
class CleanConfig:
    stopword_list: frozenset[str] = field(default_factory=default_stopwords)
    lexical_mode: LexicalMode = LexicalMode.LEMMATIZE
    spell_fix: bool = False
    lengthening_collapse_run: int = 2
    lexicon: Mapping[str, int] = field(default_factory=default_lexicon, repr=False, compare=False)
    expansions: Mapping[tuple[str, ...], tuple[str, ...]] = field(
        default_factory=default_expansions, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "stopword_list", frozenset(self.stopword_list))
        object.__setattr__(self, "lexical_mode", LexicalMode(self.lexical_mode))
        for w in self.stopword_list:
            if w != w.lower() or not w or any(c.isspace() for c in w):
                raise ContractError(f"stopword {w!r} must be lowercase with no whitespace")
        if self.lengthening_collapse_run < 2:
            raise ContractError("lengthening_collapse_run must be >= 2")


@functools.lru_cache(maxsize=None)
def default_config() -> CleanConfig:
    return CleanConfig()


def fold_accents(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def _collapse_runs(token: str, run: int) -> str:
    return re.sub(r"([a-z])\1{%d,}" % run, lambda m: m.group(1) * run, token)


def edit1_candidates(word: str) -> set[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = [a + b[1:] for a, b in splits if b]
    transposes = [a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1]
    replaces = [a + c + b[1:] for a, b in splits if b for c in letters if c != b[0]]
    inserts = [a + c + b for a, b in splits for c in letters]
    return set(deletes + transposes + replaces + inserts)


def spell_correct(word: str, lexicon: Mapping[str, int]) -> str:
    """Closest lexicon entry at edit distance one.

    Ties go to the more frequent entry, then alphabetical order. Words
    already in the lexicon, or with no candidate, come back unchanged.
    """
    if word in lexicon:
        return word
    hits = [w for w in edit1_candidates(word) if w in lexicon]
    if not hits:
        return word
    return min(hits, key=lambda w: (-lexicon[w], w))


def _fix_lengthening(token: str, config: CleanConfig) -> str:
    token = _collapse_runs(token, config.lengthening_collapse_run)
    if config.spell_fix and re.search(r"([a-z])\1", token) and token not in config.lexicon:
        token = re.sub(r"([a-z])\1+", r"\1", token)
    return token


def clean_text(text: str, config: CleanConfig | None = None) -> str:
    """Reduce ``text`` to lowercase ASCII words separated by single spaces.

    >>> clean_text("check https://t.co/8Wv now 123")
    'check now'
    """
    config = config or default_config()
    s = fold_accents(text).lower()
    s = _URL.sub(" ", s)
    s = _NON_LETTER.sub(" ", s).strip()
    if not s:
        return ""
    tokens = [_fix_lengthening(t, config) for t in s.split(" ")]
    if config.spell_fix:
        tokens = [spell_correct(t, config.lexicon) for t in tokens]
    return " ".join(tokens)


def tokenize(text: str) -> list[str]:
    return [t for t in text.split(" ") if t]


def expand_tokens(tokens: Sequence[str], expansions: Mapping[tuple[str, ...], tuple[str, ...]]) -> list[str]:
    """Rewrite informal tokens and split contractions, longest match first."""
    if not expansions:
        return list(tokens)
    longest = max(len(k) for k in expansions)
    out, i = [], 0
    while i < len(tokens):
        for n in range(min(longest, len(tokens) - i), 0, -1):
            repl = expansions.get(tuple(tokens[i : i + n]))
            if repl is not None:
                out.extend(repl)
                i += n
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


def remove_stopwords(tokens: Sequence[str], config: CleanConfig | None = None) -> list[str]:
    stop = (config or default_config()).stopword_list
    return [t for t in tokens if t not in stop]


@functools.lru_cache(maxsize=200_000)
def lemmatize_token(token: str) -> str:
    lemma = simplemma.lemmatize(token, lang="en").lower()
    # the lemmatizer can return multiword or punctuated forms; those are rejected
    return lemma if _WORD_RE.match(lemma) else token


_porter = PorterStemmer()


@functools.lru_cache(maxsize=200_000)
def stem_token(token: str) -> str:
    return _porter.stem(token)


def normalize_text(text: str, config: CleanConfig | None = None) -> str:
    config = config or default_config()
    tokens = tokenize(clean_text(text, config))
    tokens = expand_tokens(tokens, config.expansions)
    tokens = remove_stopwords(tokens, config)
    reduce = lemmatize_token if config.lexical_mode is LexicalMode.LEMMATIZE else stem_token
    tokens = [reduce(t) for t in tokens]
    # a lemma can itself be a stopword ("was" -> "be"), so filter again
    return " ".join(remove_stopwords(tokens, config))


@dataclass(frozen=True)
class ProcessedRecord:
    text: str
    summary: str
    cleaned: str
    label: int
    source_id: str = ""

    @property
    def is_empty(self) -> bool:
        return not self.cleaned


def normalize_record(record, summary: str | None = None, config: CleanConfig | None = None) -> ProcessedRecord:
    """Build the four-column processed row for a harmonized record.

    Check ``is_empty`` on the result: rows whose cleaned text is empty are
    dropped before splitting.
    """
    if summary is None:
        summary = record.text
    return ProcessedRecord(
        record.text,
        summary,
        normalize_text(summary, config),
        record.label,
        getattr(record, "source_id", ""),
    )


class TextNormalizer(TransformerMixin, BaseEstimator):
    """Map raw texts to their cleaned form; stateless.

    Parameters mirror :class:`CleanConfig`. ``stopwords`` and ``lexicon``
    accept a path to a word-list file or ``None`` for the shipped default.
    """

    def __init__(self, lexical_mode="lemmatize", spell_fix=False, lengthening_collapse_run=2,
                 stopwords=None):
        self.lexical_mode = lexical_mode
        self.spell_fix = spell_fix
        self.lengthening_collapse_run = lengthening_collapse_run
        self.stopwords = stopwords

    def _config(self) -> CleanConfig:
        kw = {}
        if self.stopwords is not None:
            if isinstance(self.stopwords, (str, os.PathLike)):
                kw["stopword_list"] = load_wordlist(self.stopwords)
            else:
                kw["stopword_list"] = frozenset(self.stopwords)
        return CleanConfig(
            lexical_mode=self.lexical_mode,
            spell_fix=self.spell_fix,
            lengthening_collapse_run=self.lengthening_collapse_run,
            **kw,
        )

    def fit(self, X, y=None):
        check_texts(X)
        self.config_ = self._config()
        return self

    def transform(self, X):
        texts = check_texts(X)
        config = getattr(self, "config_", None) or self._config()
        return [normalize_text(t, config) for t in texts]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        tags.input_tags.string = True
        return tags
