#!/usr/bin/env python3
"""End-to-end experiment on one corpus: extract, detect at 90%, filter at
70%, run the embedding detector on both representations, and leave every
artifact in the run directory.

Usage:
  python scripts/run_pipeline.py --corpus /path/to/scala/tree --out runs/demo
  python scripts/run_pipeline.py --synthetic 300 --out runs/demo
"""

import argparse
import sys
import tempfile

from clonedet.cli import main as clonedet


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", help="existing Scala source tree")
    source.add_argument("--synthetic", type=int, help="generate this many synthetic methods")
    parser.add_argument("--out", default="runs/demo")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dim", type=int, default=24)
    parser.add_argument("--epochs", type=int, default=5)
    args = parser.parse_args()

    tmp = None
    corpus = args.corpus
    if args.synthetic:
        from clonedet.synth import synth_corpus, write_corpus

        tmp = tempfile.TemporaryDirectory(prefix="pipeline_corpus_")
        write_corpus(synth_corpus(args.synthetic, seed=args.seed), tmp.name)
        corpus = tmp.name

    steps = [
        ["extract", "--corpus", corpus, "--out", args.out],
        ["detect", "--in", args.out, "--out", args.out, "--theta", "0.9"],
        ["filter", "--in", args.out, "--out", args.out, "--theta", "0.7"],
        [
            "embed",
            "--in", args.out,
            "--out", args.out,
            "--repr", "both",
            "--dim", str(args.dim),
            "--embed-epochs", str(args.epochs),
            "--rae-epochs", str(args.epochs),
            "--seed", str(args.seed),
        ],
    ]
    for step in steps:
        print(f"\n== clonedet {' '.join(step)}")
        rc = clonedet(step)
        if rc != 0:
            return rc
    if tmp:
        tmp.cleanup()
    print(f"\nartifacts in {args.out}; next: `clonedet serve --in {args.out}` to label candidates")
    return 0


if __name__ == "__main__":
    sys.exit(main())
