import pytest

from sentinel.config import PipelineConfig
from sentinel.exceptions import ContractError
from sentinel.ingest import DISCARD, RawRecord, harmonize_record
from sentinel.textprep import LexicalMode


def test_defaults():
    cfg = PipelineConfig.load(None)
    assert cfg.ratios == (0.8, 0.1, 0.1) and cfg.outlier_max_words == 430
    assert cfg.summary.trigger_words == 300 and cfg.clean.lexical_mode is LexicalMode.LEMMATIZE
    assert set(cfg.sources) == {"TDA", "AG", "IMS", "LAX", "MSH", "NTL"}


def test_overrides(tmp_path):
    (tmp_path / "stop.txt").write_text("alpha\nbeta\n")
    (tmp_path / "cfg.yaml").write_text(
        "data_dir: data\n"
        "sources: {IMS: {path: ims_v2.csv, text_column: post, label_columns: [flag]}}\n"
        "keep_all_languages: true\n"
        "preprocess: {outlier_max_words: 400, summary: {max_words: 100}, "
        "clean: {lexical_mode: stem, stopwords: stop.txt}}\n"
        "split: {ratios: [0.7, 0.15, 0.15], stratified: false}\n"
        "baseline: {regularization_strength: 4.0}\n"
        "finetune: {epochs: 1}\n"
        "transformer: {checkpoint: /models/electra}\n"
    )
    cfg = PipelineConfig.load(tmp_path / "cfg.yaml")
    ims = cfg.sources["IMS"]
    assert ims.path == tmp_path / "data" / "ims_v2.csv"
    assert (ims.text_column, list(ims.label_columns)) == ("post", ["flag"])
    assert harmonize_record(RawRecord("IMS", 0, "text", {"flag": "1"}), ims).label == 1
    assert cfg.sources["NTL"].keep_languages is None
    assert cfg.outlier_max_words == 400 and cfg.summary.max_words == 100
    assert cfg.clean.lexical_mode is LexicalMode.STEM and cfg.clean.stopword_list == {"alpha", "beta"}
    assert cfg.ratios == (0.7, 0.15, 0.15) and not cfg.stratified
    assert cfg.baseline.regularization_strength == 4.0 and cfg.finetune.epochs == 1
    assert cfg.checkpoint == "/models/electra"


@pytest.mark.parametrize(
    "raw",
    [
        {"splt": {}},
        {"split": {"ratio": [0.8, 0.1, 0.1]}},
        {"split": {"ratios": [0.8, 0.1, 0.2]}},
        {"sources": {"XYZ": {}}},
        {"baseline": {"C": 2}},
        {"preprocess": {"summary": {"min_words": 500}}},
        {"preprocess": {"clean": {"lengthening_collapse_run": 1}}},
        {"transformer": {"architecture": {"hidden_size": 100}}},
    ],
)
def test_invalid(raw):
    with pytest.raises(ContractError):
        PipelineConfig.from_dict(raw)


def test_custom_mapping_from_yaml():
    cfg = PipelineConfig.from_dict({"sources": {"LAX": {"label_columns": ["risk"], "mapping": [
        {"column": "risk", "values": ["high"], "outcome": "suicidal"},
        {"column": "risk", "values": ["low"], "outcome": "non_suicidal"},
        {"column": None, "outcome": "discard"}]}}})
    spec = cfg.sources["LAX"]
    assert harmonize_record(RawRecord("LAX", 0, "t", {"risk": "high"}), spec).label == 1
    assert harmonize_record(RawRecord("LAX", 0, "t", {"risk": "low"}), spec).label == 0
    assert harmonize_record(RawRecord("LAX", 0, "t", {"risk": "?"}), spec) is DISCARD
