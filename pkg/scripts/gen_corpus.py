#!/usr/bin/env python3
"""Generate a synthetic Scala corpus for pipeline experiments.

Usage: python scripts/gen_corpus.py --methods 500 --out /tmp/corpus --seed 0
"""

import argparse
from pathlib import Path

from clonedet.synth import synth_corpus, write_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--methods", type=int, default=500)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--clone-fraction", type=float, default=0.1)
    args = parser.parse_args()

    files = synth_corpus(args.methods, seed=args.seed, clone_fraction=args.clone_fraction)
    write_corpus(files, args.out)
    total_lines = sum(content.count("\n") for content in files.values())
    print(f"wrote {len(files)} files (~{total_lines} lines) to {Path(args.out).resolve()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
