import json
import random

import numpy as np
import pytest

from conftest import toy_texts
from sentinel.exceptions import ModelLoadError
from sentinel.model import ElectraTextClassifier, load_model, persist_model
from sentinel.model.persist import FORMAT_VERSION, read_manifest


@pytest.fixture
def fixture_texts(fixture_processed):
    rng = random.Random(0)
    return [r.cleaned for r in rng.sample(fixture_processed, 100)]


def test_baseline_roundtrip_exact(baseline_model, fixture_texts, tmp_path):
    persist_model(baseline_model, tmp_path, metrics={"f1": 1.0}, corpus_hash="abc")
    loaded = load_model(tmp_path)
    assert np.array_equal(loaded.predict_proba(fixture_texts), baseline_model.predict_proba(fixture_texts))
    assert loaded.get_params() == baseline_model.get_params()
    m = loaded.manifest_
    assert m["format_version"] == FORMAT_VERSION and m["kind"] == "baseline"
    assert m["corpus_sha256"] == "abc" and m["metrics"] == {"f1": 1.0}
    assert m["config"]["vocabulary_size"] == len(baseline_model.vocabulary_)
    assert m["model_version"].startswith("baseline-")


def test_model_version_tracks_weights(baseline_model, tmp_path):
    persist_model(baseline_model, tmp_path / "a")
    persist_model(baseline_model, tmp_path / "b")
    assert read_manifest(tmp_path / "a")["model_version"] == read_manifest(tmp_path / "b")["model_version"]


def test_empty_directory(tmp_path):
    with pytest.raises(ModelLoadError) as err:
        load_model(tmp_path)
    assert err.value.field == "manifest"


def edit_manifest(path, **changes):
    p = path / "manifest.json"
    m = json.loads(p.read_text())
    for key, value in changes.items():
        if isinstance(value, dict):
            m[key].update(value)
        else:
            m[key] = value
    p.write_text(json.dumps(m))


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"config": {"vocabulary_size": 3}}, "vocabulary_size"),
        ({"format_version": 99}, "format_version"),
        ({"kind": "mystery"}, "kind"),
    ],
)
def test_corrupt_manifest_names_field(baseline_model, tmp_path, changes, field):
    persist_model(baseline_model, tmp_path)
    edit_manifest(tmp_path, **changes)
    with pytest.raises(ModelLoadError, match=field) as err:
        load_model(tmp_path)
    assert err.value.field == field


def test_unparseable_manifest(baseline_model, tmp_path):
    persist_model(baseline_model, tmp_path)
    (tmp_path / "manifest.json").write_text("{not json")
    with pytest.raises(ModelLoadError) as err:
        load_model(tmp_path)
    assert err.value.field == "manifest"


def test_missing_weights(baseline_model, tmp_path):
    persist_model(baseline_model, tmp_path)
    (tmp_path / "weights.npz").unlink()
    with pytest.raises(ModelLoadError) as err:
        load_model(tmp_path)
    assert err.value.field == "weights"


def test_unknown_model_type(tmp_path):
    with pytest.raises(TypeError):
        persist_model(object(), tmp_path)


def test_transformer_roundtrip_exact(tiny_checkpoint, tmp_path):
    path, arch = tiny_checkpoint
    texts, labels = toy_texts(100, seed=4)
    clf = ElectraTextClassifier(checkpoint=str(path), epochs=0, architecture=arch, max_sequence_tokens=64,
                                local_files_only=True, device="cpu").fit(texts, labels)
    persist_model(clf, tmp_path / "m")
    loaded = load_model(tmp_path / "m")
    assert np.array_equal(loaded.predict_proba(texts), clf.predict_proba(texts))
    assert loaded.manifest_["kind"] == "transformer"
    assert loaded.manifest_["config"]["architecture"]["hidden_size"] == arch.hidden_size
