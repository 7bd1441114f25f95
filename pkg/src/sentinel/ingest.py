"""Load the six source tables and harmonize their labels into one binary corpus."""

from __future__ import annotations

import csv
import enum
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exceptions import HeaderMismatchError, SourceLoadError, UnmappedLabelError

logger = logging.getLogger(__name__)

SOURCE_IDS = ("TDA", "AG", "IMS", "LAX", "MSH", "NTL")

NON_SUICIDAL = 0
SUICIDAL = 1

csv.field_size_limit(min(sys.maxsize, 2**31 - 1))


class Outcome(enum.Enum):
    SUICIDAL = "suicidal"
    NON_SUICIDAL = "non_suicidal"
    DISCARD = "discard"


class Disposition(enum.Enum):
    """Marker returned by :func:`harmonize_record` for rows that do not survive."""

    DISCARD = "discard"
    MALFORMED = "malformed"


DISCARD = Disposition.DISCARD
MALFORMED = Disposition.MALFORMED

_INTEGRAL = re.compile(r"^[+-]?\d+(?:\.0*)?$")


def canonical_label(value) -> str:
    """Canonical string form of a raw label so "1", 1 and "1.0" compare equal."""
    if value is None:
        return ""
    s = str(value).strip()
    if _INTEGRAL.match(s):
        return str(int(float(s)))
    return s


@dataclass(frozen=True)
class LabelRule:
    """Map raw values of one label column to an outcome.

    ``column=None`` makes the rule a catch-all that matches every row.
    """

    column: str | None
    values: tuple[str, ...]
    outcome: Outcome

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(canonical_label(v) for v in self.values))
        if not isinstance(self.outcome, Outcome):
            object.__setattr__(self, "outcome", Outcome(self.outcome))

    @property
    def is_catch_all(self) -> bool:
        return self.column is None

    def matches(self, raw_labels: Mapping[str, str]) -> bool:
        if self.column is None:
            return True
        return canonical_label(raw_labels.get(self.column)) in self.values


@dataclass(frozen=True)
class TableFormat:
    delimiter: str = ","
    quotechar: str = '"'
    encoding: str = "utf-8"
    header: bool = True


@dataclass
class SourceSpec:
    source_id: str
    path: Path
    text_column: str
    label_columns: list[str]
    mapping: list[LabelRule]
    format: TableFormat = field(default_factory=TableFormat)
    language_column: str | None = None
    keep_languages: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.source_id not in SOURCE_IDS:
            raise ValueError(f"unknown source_id {self.source_id!r}; expected one of {SOURCE_IDS}")
        self.path = Path(self.path)
        for rule in self.mapping:
            if rule.column is not None and rule.column not in self.label_columns:
                raise ValueError(f"{self.source_id}: rule column {rule.column!r} is not a label column")

    @property
    def required_columns(self) -> list[str]:
        cols = [self.text_column, *self.label_columns]
        if self.language_column and self.keep_languages is not None:
            cols.append(self.language_column)
        return cols


@dataclass(frozen=True)
class RawRecord:
    source_id: str
    row_index: int
    text: str
    raw_labels: dict[str, str]
    language: str | None = None


@dataclass(frozen=True)
class HarmonizedRecord:
    source_id: str
    text: str
    label: int
    row_index: int = -1
    raw_labels: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not self.text.strip():
            raise ValueError("text must be non-empty")


@dataclass
class SourceTally:
    kept_suicidal: int = 0
    kept_non_suicidal: int = 0
    discarded: int = 0
    malformed: int = 0
    duplicates: int = 0

    @property
    def kept(self) -> int:
        return self.kept_suicidal + self.kept_non_suicidal

    @property
    def rows_read(self) -> int:
        return self.kept + self.discarded + self.malformed + self.duplicates

    def __add__(self, other: "SourceTally") -> "SourceTally":
        return SourceTally(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))


@dataclass
class IngestTally:
    sources: dict[str, SourceTally] = field(default_factory=dict)

    def __getitem__(self, source_id: str) -> SourceTally:
        return self.sources[source_id]

    def total(self) -> SourceTally:
        out = SourceTally()
        for t in self.sources.values():
            out = out + t
        return out

    def to_text(self) -> str:
        lines = []
        for sid in sorted(self.sources, key=_source_order):
            t = self.sources[sid]
            for f in fields(t):
                lines.append(f"{sid}.{f.name}={getattr(t, f.name)}")
            lines.append(f"{sid}.rows_read={t.rows_read}")
        tot = self.total()
        lines.append(f"total.kept={tot.kept}")
        lines.append(f"total.rows_read={tot.rows_read}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IngestTally":
        tally = cls()
        names = {f.name for f in fields(SourceTally)}
        for line in text.splitlines():
            if not line.strip() or "=" not in line:
                continue
            key, value = line.split("=", 1)
            sid, name = key.split(".", 1)
            if sid in SOURCE_IDS and name in names:
                setattr(tally.sources.setdefault(sid, SourceTally()), name, int(value))
        return tally


def _source_order(sid: str) -> int:
    return SOURCE_IDS.index(sid) if sid in SOURCE_IDS else len(SOURCE_IDS)


def default_source_specs(data_dir: str | Path = ".") -> dict[str, SourceSpec]:
    """Default layout and label rules for each of the six datasets.

    File names default to ``<source id in lowercase>.csv`` under ``data_dir``.
    """
    d = Path(data_dir)
    S, N, X = Outcome.SUICIDAL, Outcome.NON_SUICIDAL, Outcome.DISCARD
    specs = [
        SourceSpec(
            "TDA", d / "tda.csv", "Post", ["Label"],
            [
                LabelRule("Label", ("Attempt", "Ideation"), S),
                LabelRule("Label", ("Supportive", "Behavior", "Indicator"), N),
            ],
        ),
        # Suicidal_Label is inverted: 0 marks the suicidal posts. Sentiment is kept for audit only.
        SourceSpec(
            "AG", d / "ag.csv", "Post", ["Suicidal_Label", "Sentiment_Label"],
            [
                LabelRule("Suicidal_Label", ("0",), S),
                LabelRule("Suicidal_Label", ("1",), N),
            ],
        ),
        SourceSpec(
            "IMS", d / "ims.csv", "text", ["label"],
            [
                LabelRule("label", ("1", "suicidal", "Suicidal"), S),
                LabelRule("label", ("0", "non-suicidal", "Non-Suicidal", "non_suicidal"), N),
            ],
        ),
        SourceSpec(
            "LAX", d / "lax.csv", "tweet", ["intention"],
            [
                LabelRule("intention", ("1",), S),
                LabelRule("intention", ("0",), N),
            ],
        ),
        SourceSpec("MSH", d / "msh.csv", "text", [], [LabelRule(None, (), S)]),
        SourceSpec(
            "NTL", d / "ntl.csv", "full_text", ["label"],
            [
                LabelRule("label", ("0", "1"), S),
                LabelRule("label", ("2", "4"), N),
                LabelRule("label", ("3",), X),
            ],
            language_column="lang",
            keep_languages=("en",),
        ),
    ]
    return {s.source_id: s for s in specs}


def load_source(spec: SourceSpec) -> list[RawRecord]:
    """Read every data row of ``spec.path`` as a :class:`RawRecord`.

    Rows whose text cell is missing or blank come back with ``text=""``.
    """
    fmt = spec.format
    try:
        fh = open(spec.path, newline="", encoding=fmt.encoding)
    except OSError as exc:
        raise SourceLoadError(f"cannot read {spec.path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=fmt.delimiter, quotechar=fmt.quotechar)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatchError(spec.path, spec.required_columns) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise SourceLoadError(f"cannot parse {spec.path}: {exc}") from exc
        if header and header[0].startswith("﻿"):
            header[0] = header[0][1:]
        missing = [c for c in spec.required_columns if c not in header]
        if missing:
            raise HeaderMismatchError(spec.path, missing)
        pos = {name: header.index(name) for name in header}
        ti = pos[spec.text_column]
        li = [(c, pos[c]) for c in spec.label_columns]
        gi = pos.get(spec.language_column) if spec.language_column else None

        records = []
        try:
            for row_index, row in enumerate(reader):
                if not row:
                    continue

                def cell(i):
                    return row[i] if i < len(row) else ""

                text = cell(ti)
                if not text.strip():
                    text = ""
                records.append(
                    RawRecord(
                        spec.source_id,
                        row_index,
                        text,
                        {c: cell(i).strip() for c, i in li},
                        cell(gi).strip() if gi is not None else None,
                    )
                )
        except (csv.Error, UnicodeDecodeError) as exc:
            raise SourceLoadError(f"cannot parse {spec.path}: {exc}") from exc
    return records


def harmonize_record(record: RawRecord, spec: SourceSpec) -> HarmonizedRecord | Disposition:
    if not record.text.strip():
        return MALFORMED
    if (
        spec.keep_languages is not None
        and record.language
        and record.language not in spec.keep_languages
    ):
        return DISCARD
    for rule in spec.mapping:
        if rule.matches(record.raw_labels):
            if rule.outcome is Outcome.DISCARD:
                return DISCARD
            label = SUICIDAL if rule.outcome is Outcome.SUICIDAL else NON_SUICIDAL
            return HarmonizedRecord(
                record.source_id, record.text, label, record.row_index, dict(record.raw_labels)
            )
    raise UnmappedLabelError(record.source_id, record.raw_labels)


def harmonize_source(
    records: Iterable[RawRecord], spec: SourceSpec
) -> tuple[list[HarmonizedRecord], SourceTally]:
    kept, tally = [], SourceTally()
    for rec in records:
        out = harmonize_record(rec, spec)
        if out is MALFORMED:
            tally.malformed += 1
        elif out is DISCARD:
            tally.discarded += 1
        else:
            kept.append(out)
            if out.label == SUICIDAL:
                tally.kept_suicidal += 1
            else:
                tally.kept_non_suicidal += 1
    return kept, tally


def merge_corpus(
    batches: Sequence[Sequence[HarmonizedRecord]],
    tallies: Mapping[str, SourceTally] | None = None,
    dedupe: bool = False,
) -> tuple[list[HarmonizedRecord], IngestTally]:
    """Concatenate harmonized batches in order.

    ``tallies`` carries the discard/malformed counts from
    :func:`harmonize_source`; without it only kept rows are counted.
    With ``dedupe`` the first occurrence of each exact text wins and later
    copies are counted as duplicates against their own source.
    """
    tally = IngestTally()
    if tallies:
        for sid, t in tallies.items():
            tally.sources[sid] = SourceTally(t.kept_suicidal, t.kept_non_suicidal, t.discarded, t.malformed, t.duplicates)
    else:
        for batch in batches:
            for rec in batch:
                t = tally.sources.setdefault(rec.source_id, SourceTally())
                if rec.label == SUICIDAL:
                    t.kept_suicidal += 1
                else:
                    t.kept_non_suicidal += 1

    corpus: list[HarmonizedRecord] = []
    seen: set[str] = set()
    for batch in batches:
        for rec in batch:
            if dedupe:
                if rec.text in seen:
                    t = tally.sources[rec.source_id]
                    t.duplicates += 1
                    if rec.label == SUICIDAL:
                        t.kept_suicidal -= 1
                    else:
                        t.kept_non_suicidal -= 1
                    continue
                seen.add(rec.text)
            corpus.append(rec)
    return corpus, tally


def ingest(specs: Sequence[SourceSpec], dedupe: bool = False, max_workers: int = 4):
    """Load, harmonize and merge ``specs``; sources are read concurrently."""
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        loaded = list(pool.map(load_source, specs))
    batches, tallies = [], {}
    for spec, raw in zip(specs, loaded):
        kept, t = harmonize_source(raw, spec)
        logger.info("%s: read %d rows, kept %d", spec.source_id, len(raw), t.kept)
        batches.append(kept)
        tallies[spec.source_id] = t
    return merge_corpus(batches, tallies, dedupe=dedupe)


CORPUS_COLUMNS = ("source_id", "text", "label")


def write_corpus(corpus: Iterable[HarmonizedRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CORPUS_COLUMNS)
        for rec in corpus:
            w.writerow((rec.source_id, rec.text, rec.label))


def read_corpus(path: str | Path) -> list[HarmonizedRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            HarmonizedRecord(row["source_id"], row["text"], int(row["label"]), i)
            for i, row in enumerate(reader)
        ]
