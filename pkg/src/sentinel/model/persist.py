"""Save and load fitted classifiers as a directory plus a JSON manifest."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .. import __version__
from ..exceptions import ModelLoadError
from .baseline import TfidfLogisticClassifier
from .transformer import ElectraTextClassifier, TransformerConfig

FORMAT_VERSION = 1
MANIFEST = "manifest.json"


def _hash_files(paths) -> str:
    h = hashlib.sha256()
    for p in sorted(paths):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


def persist_model(model, path, *, metrics: dict | None = None, corpus_hash: str = "",
                  extra: dict | None = None) -> Path:
    """Write ``model`` to directory ``path`` and return the manifest path."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(model, TfidfLogisticClassifier):
        kind = "baseline"
        terms = sorted(model.vocabulary_, key=model.vocabulary_.get)
        (out / "vocabulary.json").write_text(json.dumps(terms), encoding="utf-8")
        np.savez(out / "weights.npz", idf=model.idf_, coef=model.coef_,
                 intercept=np.array([model.intercept_]))
        weight_files = [out / "vocabulary.json", out / "weights.npz"]
        params = model.get_params()
        params["ngram_range"] = list(params["ngram_range"])
        config = {"estimator": params, "vocabulary_size": len(terms)}
    elif isinstance(model, ElectraTextClassifier):
        kind = "transformer"
        wdir = out / "weights"
        model.model_.save_pretrained(wdir)
        model.tokenizer_.save_pretrained(wdir)
        weight_files = [p for p in wdir.iterdir() if p.is_file()]
        params = {k: v for k, v in model.get_params().items() if k not in ("architecture", "device")}
        config = {
            "estimator": params,
            "architecture": asdict(TransformerConfig.from_hf(model.model_.config)),
            "finetune": asdict(model.finetune_config()),
        }
    else:
        raise TypeError(f"cannot persist {type(model).__name__}")

    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "package_version": __version__,
        "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "model_version": f"{kind}-{_hash_files(weight_files)[:12]}",
        "config": config,
        "corpus_sha256": corpus_hash,
        "metrics": metrics or {},
    }
    if extra:
        manifest.update(extra)
    target = out / MANIFEST
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def read_manifest(path) -> dict:
    p = Path(path) / MANIFEST
    if not p.is_file():
        raise ModelLoadError(f"no {MANIFEST} in {path}", field="manifest")
    try:
        manifest = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"corrupt manifest {p}: {exc}", field="manifest") from exc
    for key in ("format_version", "kind", "config", "model_version"):
        if key not in manifest:
            raise ModelLoadError(f"manifest lacks {key!r}", field=key)
    if manifest["format_version"] != FORMAT_VERSION:
        raise ModelLoadError(
            f"format_version {manifest['format_version']!r} is not supported (expected {FORMAT_VERSION})",
            field="format_version",
        )
    return manifest


def load_model(path):
    """Inverse of :func:`persist_model`.

    The returned estimator carries the manifest as ``manifest_``.
    """
    d = Path(path)
    manifest = read_manifest(d)
    kind, config = manifest["kind"], manifest["config"]
    if kind == "baseline":
        try:
            terms = json.loads((d / "vocabulary.json").read_text(encoding="utf-8"))
            with np.load(d / "weights.npz") as w:
                idf, coef, intercept = w["idf"], w["coef"], float(w["intercept"][0])
        except (OSError, KeyError, ValueError) as exc:
            raise ModelLoadError(f"cannot read baseline weights in {d}: {exc}", field="weights") from exc
        if config.get("vocabulary_size") != len(terms) or len(idf) != len(terms) or len(coef) != len(terms):
            raise ModelLoadError(
                f"vocabulary_size {config.get('vocabulary_size')!r} does not match weights ({len(terms)})",
                field="vocabulary_size",
            )
        params = dict(config["estimator"])
        params["ngram_range"] = tuple(params["ngram_range"])
        model = TfidfLogisticClassifier(**params)
        model.vocabulary_ = {t: i for i, t in enumerate(terms)}
        model.idf_, model.coef_, model.intercept_ = idf, coef, intercept
        model.classes_ = np.array([0, 1])
    elif kind == "transformer":
        wdir = d / "weights"
        if not wdir.is_dir():
            raise ModelLoadError(f"no weights directory in {d}", field="weights")
        arch = TransformerConfig(**config["architecture"])
        params = dict(config["estimator"])
        params.update(checkpoint=str(wdir), local_files_only=True, architecture=arch)
        model = ElectraTextClassifier(**params)
        try:
            model.load_checkpoint()
        except ModelLoadError:
            raise
        except Exception as exc:
            raise ModelLoadError(f"cannot load transformer weights from {wdir}: {exc}", field="weights") from exc
    else:
        raise ModelLoadError(f"unknown model kind {kind!r}", field="kind")
    model.manifest_ = manifest
    return model
