"""Plot convergence traces written by `fpa run` on a log scale.

usage: python scripts/plot_traces.py OUT_DIR [--save FILE]
"""
import argparse
import csv
import pathlib

import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--save", type=pathlib.Path)
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in sorted(args.out_dir.glob("trace_*.csv")):
        with path.open() as f:
            rows = list(csv.DictReader(f))
        it = [int(r["iteration"]) for r in rows]
        # zero cannot be drawn on a log axis
        best = [max(float(r["best_fitness"]), 1e-300) for r in rows]
        ax.semilogy(it, best, label=path.stem.removeprefix("trace_"))
    ax.set_xlabel("iteration")
    ax.set_ylabel("best fitness")
    ax.legend()
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
