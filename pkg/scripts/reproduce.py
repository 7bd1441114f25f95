"""Run the full pipeline end to end and print the reproduction table.

    python scripts/reproduce.py --config configs/datasets.example.yaml --model transformer
    python scripts/reproduce.py --fixture            # bundled synthetic data, baseline model

Each stage is the matching ``sentinel`` subcommand; the first non-zero
exit code stops the run and is returned.
"""

import argparse
import sys

from sentinel.cli import main as sentinel

STAGES = ("ingest", "preprocess", "split", "train", "evaluate", "report")


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--config")
    parser.add_argument("--fixture", action="store_true")
    parser.add_argument("--out", default="work")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--model", choices=("baseline", "transformer"), default="baseline")
    args = parser.parse_args(argv)

    common = ["--out", args.out, "--seed", str(args.seed), "--model", args.model]
    if args.config:
        common += ["--config", args.config]
    elif args.fixture:
        common.append("--fixture")
    else:
        parser.error("pass --config or --fixture")
    for stage in STAGES:
        print(f"== {stage}", flush=True)
        code = sentinel([stage, *common])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
