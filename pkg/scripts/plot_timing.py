#!/usr/bin/env python3
"""Plot detector execution time against corpus size from a bench timing.csv.

Produces two panels (time vs lines of code, time vs method count) with one
curve per detector, log-scaled y axis since the detectors differ by orders
of magnitude.

Usage: python scripts/plot_timing.py bench/timing.csv -o timing.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv_path")
    parser.add_argument("-o", "--out", default="timing.png")
    args = parser.parse_args()

    series: dict[str, list[tuple[int, int, float]]] = defaultdict(list)
    with open(args.csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            series[row["detector"]].append(
                (int(row["loc"]), int(row["method_count"]), float(row["seconds"]))
            )

    fig, (ax_loc, ax_methods) = plt.subplots(1, 2, figsize=(11, 4.5))
    for detector, rows in sorted(series.items()):
        rows.sort()
        ax_loc.plot([r[0] for r in rows], [r[2] for r in rows], marker="o", label=detector)
        ax_methods.plot([r[1] for r in rows], [r[2] for r in rows], marker="o", label=detector)
    for ax, xlabel in ((ax_loc, "lines of code"), (ax_methods, "methods")):
        ax.set_xlabel(xlabel)
        ax.set_ylabel("seconds")
        ax.set_yscale("log")
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.suptitle("Detector execution time vs corpus size")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
