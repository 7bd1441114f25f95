"""Command-line entry point: ``sentinel <command> [flags]``.

Stages talk to each other only through files under ``--out``::

    ingest      -> OUT/ingest/corpus.csv, tally.txt
    preprocess  -> OUT/preprocess/processed.csv
    split       -> OUT/split/{train,validation,test}.csv, split_manifest.json
    train       -> OUT/model/<baseline|transformer>/
    evaluate    -> OUT/evaluate/<baseline|transformer>/
    report      -> OUT/report/
    serve       -> runs the HTTP API

Exit status is 0 on success, 1 on a contract error (bad input, missing
upstream stage) and 2 on an environment error (unreadable file, missing
checkpoint).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import logging
import sys
import time
from dataclasses import asdict, is_dataclass
from importlib import resources
from pathlib import Path

from . import __version__
from .config import PipelineConfig
from .exceptions import ContractError, EnvironmentError_, MissingArtifactError, SentinelError

logger = logging.getLogger("sentinel")

COMMANDS = ("ingest", "preprocess", "split", "train", "evaluate", "report", "serve")


def fixture_config_path() -> Path:
    return Path(str(resources.files("sentinel") / "data" / "fixture" / "fixture.yaml"))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(obj):
    if is_dataclass(obj):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in obj]
        return sorted(items, key=str) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "value"):
        return obj.value
    return obj


def write_run_manifest(out_dir: Path, args, inputs, outputs, started: float, extra=None) -> Path:
    """One manifest per command execution, enough to re-derive the command line."""
    finished = time.time()
    manifest = {
        "command": args.command,
        "argv": list(getattr(args, "argv", [])),
        "config_path": str(args.config) if args.config else None,
        "config": _jsonable(args.pipeline.raw),
        "seed": args.seed,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": sorted(str(p) for p in outputs),
        "timings": {
            "started_at": _dt.datetime.fromtimestamp(started, _dt.timezone.utc).isoformat(),
            "seconds": round(finished - started, 3),
        },
        "tool_version": __version__,
    }
    if extra:
        manifest.update(_jsonable(extra))
    path = out_dir / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _require(path: Path, command: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(command, path)
    return path


def cmd_ingest(args):
    from .ingest import ingest, write_corpus

    cfg = args.pipeline
    specs = cfg.sources
    if args.sources:
        wanted = [s.strip().upper() for s in args.sources.split(",") if s.strip()]
        unknown = [s for s in wanted if s not in specs]
        if unknown:
            raise ContractError(f"unknown source(s): {', '.join(unknown)}")
        specs = {k: specs[k] for k in wanted}
    corpus, tally = ingest(list(specs.values()), dedupe=cfg.dedupe)
    out = args.out / "ingest"
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, out / "corpus.csv")
    (out / "tally.txt").write_text(tally.to_text(), encoding="utf-8")
    print(f"ingested {len(corpus)} records from {len(specs)} source(s)")
    return [s.path for s in specs.values()], [out / "corpus.csv", out / "tally.txt"], out


def preprocess_corpus(corpus, cfg: PipelineConfig):
    """merge -> outlier filter -> summarize -> normalize -> drop empty."""
    from .corpus import filter_outliers
    from .summarize import recursive_summarize
    from .textprep import normalize_record

    kept = filter_outliers(corpus, cfg.outlier_max_words)
    processed, empty = [], 0
    for rec in kept:
        pr = normalize_record(rec, recursive_summarize(rec.text, cfg.summary), cfg.clean)
        if pr.is_empty:
            empty += 1
        else:
            processed.append(pr)
    stats = {"input": len(corpus), "outliers": len(corpus) - len(kept), "empty_cleaned": empty,
             "output": len(processed)}
    return processed, stats


def cmd_preprocess(args):
    from .corpus import write_processed
    from .ingest import read_corpus

    src = _require(args.out / "ingest" / "corpus.csv", "ingest")
    processed, stats = preprocess_corpus(read_corpus(src), args.pipeline)
    out = args.out / "preprocess"
    out.mkdir(parents=True, exist_ok=True)
    write_processed(processed, out / "processed.csv")
    (out / "preprocess_stats.txt").write_text("".join(f"{k}={v}\n" for k, v in stats.items()), encoding="utf-8")
    print(f"preprocessed {stats['output']} records ({stats['outliers']} outliers, {stats['empty_cleaned']} empty)")
    return [src], [out / "processed.csv", out / "preprocess_stats.txt"], out


def cmd_split(args):
    from .corpus import read_processed, split_corpus, write_split

    src = _require(args.out / "preprocess" / "processed.csv", "preprocess")
    cfg = args.pipeline
    split = split_corpus(read_processed(src), cfg.ratios, args.seed, cfg.stratified)
    out = args.out / "split"
    manifest = write_split(split, out)
    c = split.counts()
    print("split " + " / ".join(f"{k}={v['total']}" for k, v in c.items()))
    return [src], [out / f"{n}.csv" for n in ("train", "validation", "test")] + [manifest], out


def cmd_train(args):
    from .corpus import read_split
    from .evaluate import compute_metrics, confusion
    from .model import TfidfLogisticClassifier, finetune_transformer, persist_model

    split_dir = _require(args.out / "split" / "split_manifest.json", "split").parent
    split = read_split(split_dir)
    cfg = args.pipeline
    if args.model == "baseline":
        model = TfidfLogisticClassifier.from_config(cfg.baseline).fit(
            [r.cleaned for r in split.train], [r.label for r in split.train]
        )
    else:
        from dataclasses import replace

        model = finetune_transformer(
            split.train, split.validation, cfg.architecture, replace(cfg.finetune, seed=args.seed), cfg.checkpoint
        )
    metrics = {}
    if split.validation:
        preds = model.predict([r.cleaned for r in split.validation])
        metrics = {"validation": asdict(compute_metrics(confusion([r.label for r in split.validation], preds)))}
    out = args.out / "model" / args.model
    persist_model(model, out, metrics=metrics, corpus_hash=split.corpus_hash)
    print(f"trained {args.model} model -> {out}")
    inputs = [split_dir / "train.csv", split_dir / "validation.csv"]
    return inputs, sorted(p for p in out.rglob("*") if p.is_file()), out


def cmd_evaluate(args):
    from .corpus import read_split
    from .evaluate import evaluation_report, reproduction_table
    from .model import load_model

    model_dir = _require(args.out / "model" / args.model / "manifest.json", "train").parent
    split_dir = _require(args.out / "split" / "split_manifest.json", "split").parent
    split = read_split(split_dir)
    model = load_model(model_dir)
    out = args.out / "evaluate" / args.model
    report = evaluation_report(model, split.test, out)
    print(reproduction_table(report), end="")
    return [split_dir / "test.csv", model_dir / "manifest.json"], sorted(out.iterdir()), out


def cmd_report(args):
    from . import plots
    from .corpus import corpus_stats, read_processed, word_count_histogram
    from .ingest import IngestTally, read_corpus

    tally_path = _require(args.out / "ingest" / "tally.txt", "ingest")
    corpus_path = _require(args.out / "ingest" / "corpus.csv", "ingest")
    processed_path = _require(args.out / "preprocess" / "processed.csv", "preprocess")
    out = args.out / "report"
    out.mkdir(parents=True, exist_ok=True)
    tally = IngestTally.from_text(tally_path.read_text(encoding="utf-8"))
    raw = read_corpus(corpus_path)
    processed = read_processed(processed_path)
    raw_stats = corpus_stats(raw, k=1)
    stats = corpus_stats(processed, k=args.top_k)
    hist = word_count_histogram(raw)

    plots.source_breakdown(tally, out / "source_breakdown.png")
    plots.word_count_histogram(hist, out / "word_counts.png", cutoff=args.pipeline.outlier_max_words)
    plots.class_distribution(stats.class_counts, out / "class_distribution.png")
    plots.top_words(stats.top_words, out / "top_words.png")
    (out / "source_breakdown.txt").write_text(tally.to_text(), encoding="utf-8")
    lines = [f"records={raw_stats.size}"] + [f"p{p:g}={w}" for p, w in raw_stats.word_count_percentiles.items()]
    (out / "word_count_percentiles.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "word_counts.csv").write_text(
        "bin_start,count\n" + "".join(f"{a},{b}\n" for a, b in hist), encoding="utf-8")
    (out / "class_distribution.csv").write_text(
        "label,count\n" + "".join(f"{k},{v}\n" for k, v in sorted(stats.class_counts.items())), encoding="utf-8")
    (out / "top_words.csv").write_text(
        "token,count\n" + "".join(f"{w},{c}\n" for w, c in stats.top_words), encoding="utf-8")
    inputs = [tally_path, corpus_path, processed_path]
    split_manifest = args.out / "split" / "split_manifest.json"
    if split_manifest.exists():
        counts = json.loads(split_manifest.read_text(encoding="utf-8"))["counts"]
        plots.split_counts(counts, out / "split_counts.png")
        inputs.append(split_manifest)
    print(f"report written to {out}")
    return inputs, sorted(out.iterdir()), out


def cmd_serve(args):
    from .service import ServiceConfig, serve, with_overrides

    config = ServiceConfig.load(args.service_config)
    default_model = args.out / "model" / args.model
    if not config.model_path:
        _require(default_model / "manifest.json", "train")
        config = with_overrides(config, model_path=str(default_model))
    config = with_overrides(config, port=args.port)
    serve(config)
    return None


HANDLERS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "split": cmd_split,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "serve": cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="pipeline YAML config")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", type=Path, default=Path("work"), help="workspace directory")
    common.add_argument("--model", choices=("baseline", "transformer"), default="baseline")
    common.add_argument("--sources", help="comma-separated subset of TDA,AG,IMS,LAX,MSH,NTL")
    common.add_argument("--fixture", action="store_true",
                        help="use the bundled 500-record synthetic fixture as the data source")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sentinel", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "report":
            p.add_argument("--top-k", type=int, default=20)
        if name == "serve":
            p.add_argument("--port", type=int)
            p.add_argument("--service-config", type=Path,
                           help="service YAML (keys mirror the SENTINEL_* variables)")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config_path = args.config or (fixture_config_path() if args.fixture else None)
        if args.fixture and not args.config:
            args.config = config_path
        args.pipeline = PipelineConfig.load(config_path)
        started = time.time()
        result = HANDLERS[args.command](args)
        if result is not None:
            inputs, outputs, out_dir = result
            write_run_manifest(out_dir, args, inputs, outputs, started)
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EnvironmentError_, OSError) as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return 2
    except SentinelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
