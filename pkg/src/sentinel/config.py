"""YAML pipeline configuration shared by the CLI stages.

Every section is optional; missing keys take the library defaults.

.. code-block:: yaml

    data_dir: data/            # relative to this file
    sources:
      TDA: {path: tda.csv}
      LAX:
        path: lax.csv
        text_column: tweet
        label_columns: [intention]
        mapping:
          - {column: intention, values: [1], outcome: suicidal}
          - {column: intention, values: [0], outcome: non_suicidal}
    dedupe: false
    keep_all_languages: false
    preprocess:
      outlier_max_words: 430
      summary: {trigger_words: 300, min_words: 50, max_words: 120, max_depth: 5}
      clean: {lexical_mode: lemmatize, spell_fix: false, stopwords: null}
    split: {ratios: [0.8, 0.1, 0.1], stratified: true}
    baseline: {min_document_frequency: 2}
    finetune: {epochs: 3}
    transformer: {checkpoint: gooojy/suicidal-electra}
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from .corpus import check_ratios
from .exceptions import ContractError
from .ingest import SOURCE_IDS, LabelRule, SourceSpec, TableFormat, default_source_specs
from .model.baseline import BaselineConfig
from .model.transformer import DEFAULT_CHECKPOINT, FinetuneConfig, TransformerConfig
from .summarize import SummaryConfig
from .textprep import CleanConfig, load_wordlist


TOP_LEVEL_KEYS = ("data_dir", "sources", "dedupe", "keep_all_languages", "preprocess", "split",
                  "baseline", "finetune", "transformer")


def _check_keys(data, known, section):
    if data is None:
        return
    if not isinstance(data, dict):
        raise ContractError(f"{section!r} must be a mapping")
    unknown = set(data) - set(known)
    if unknown:
        raise ContractError(f"unknown keys in {section!r}: {sorted(unknown)}")


def _build(cls, data, section):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ContractError(f"unknown keys in {section!r}: {sorted(unknown)}")
    for f in fields(cls):
        if f.name in data and isinstance(data[f.name], list):
            data[f.name] = tuple(data[f.name])
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ContractError(f"bad {section!r} settings: {exc}") from exc


@dataclass
class PipelineConfig:
    sources: dict[str, SourceSpec] = field(default_factory=default_source_specs)
    dedupe: bool = False
    outlier_max_words: int = 430
    summary: SummaryConfig = field(default_factory=SummaryConfig)
    clean: CleanConfig = field(default_factory=CleanConfig)
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    stratified: bool = True
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    finetune: FinetuneConfig = field(default_factory=FinetuneConfig)
    architecture: TransformerConfig = field(default_factory=TransformerConfig)
    checkpoint: str = DEFAULT_CHECKPOINT
    raw: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path=None) -> "PipelineConfig":
        if path is None:
            return cls()
        p = Path(path)
        raw = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        return cls.from_dict(raw, base_dir=p.parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "PipelineConfig":
        base = Path(base_dir)
        _check_keys(raw, TOP_LEVEL_KEYS, "config")
        _check_keys(raw.get("preprocess"), ("outlier_max_words", "summary", "clean"), "preprocess")
        _check_keys(raw.get("split"), ("ratios", "stratified"), "split")
        _check_keys(raw.get("transformer"), ("checkpoint", "architecture"), "transformer")
        data_dir = base / raw.get("data_dir", ".")
        specs = default_source_specs(data_dir)
        keep_all = bool(raw.get("keep_all_languages", False))
        for sid, over in (raw.get("sources") or {}).items():
            if sid not in SOURCE_IDS:
                raise ContractError(f"unknown source {sid!r}")
            specs[sid] = _source_spec(specs[sid], over or {}, data_dir)
        if keep_all:
            specs = {k: replace(v, keep_languages=None) for k, v in specs.items()}

        pre = raw.get("preprocess") or {}
        clean_raw = dict(pre.get("clean") or {})
        stop = clean_raw.pop("stopwords", None)
        if stop:
            clean_raw["stopword_list"] = load_wordlist(base / stop)
        split = raw.get("split") or {}
        tr = dict(raw.get("transformer") or {})
        return cls(
            sources=specs,
            dedupe=bool(raw.get("dedupe", False)),
            outlier_max_words=int(pre.get("outlier_max_words", 430)),
            summary=_build(SummaryConfig, pre.get("summary"), "preprocess.summary"),
            clean=_build(CleanConfig, clean_raw, "preprocess.clean"),
            ratios=check_ratios(split.get("ratios", (0.8, 0.1, 0.1))),
            stratified=bool(split.get("stratified", True)),
            baseline=_build(BaselineConfig, raw.get("baseline"), "baseline"),
            finetune=_build(FinetuneConfig, raw.get("finetune"), "finetune"),
            architecture=_build(TransformerConfig, tr.get("architecture"), "transformer.architecture"),
            checkpoint=str(tr.get("checkpoint", DEFAULT_CHECKPOINT)),
            raw=raw,
        )


def _source_spec(default: SourceSpec, over: dict, data_dir: Path) -> SourceSpec:
    kw = {}
    for key in ("text_column", "language_column"):
        if key in over:
            kw[key] = over[key]
    if "path" in over:
        kw["path"] = data_dir / over["path"]
    if "label_columns" in over:
        kw["label_columns"] = list(over["label_columns"])
    if "keep_languages" in over:
        kl = over["keep_languages"]
        kw["keep_languages"] = None if kl is None else tuple(kl)
    if "format" in over:
        kw["format"] = _build(TableFormat, over["format"], f"sources.{default.source_id}.format")
    if "mapping" in over:
        kw["mapping"] = [
            LabelRule(r.get("column"), tuple(r.get("values", ())), r["outcome"]) for r in over["mapping"]
        ]
    elif len(kw.get("label_columns", ())) == 1 and len(default.label_columns) == 1:
        # renaming a single label column carries its rules along
        old, new = default.label_columns[0], kw["label_columns"][0]
        kw["mapping"] = [replace(r, column=new) if r.column == old else r for r in default.mapping]
    try:
        return replace(default, **kw)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
