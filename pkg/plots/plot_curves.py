#!/usr/bin/env python3
"""Plot episode-return learning curves from one or more training CSVs
(columns episode,steps,return,epsilon,loss_mean).

    python3 plots/plot_curves.py --in a.csv --in b.csv --labels dqn ddqn \
        --window 50 --out curves.png

Returns are smoothed with a trailing moving average; --window 1 plots the
raw data.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from _schema import SchemaError, load_curve

LINE_COLORS = ("black", "red", "orange", "tab:blue", "tab:green",
               "tab:purple")


def moving_average(values, window):
    smoothed = []
    total = 0.0
    for i, value in enumerate(values):
        total += value
        if i >= window:
            total -= values[i - window]
        smoothed.append(total / min(i + 1, window))
    return smoothed


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infiles", action="append", required=True,
                        help="training curve CSV (repeatable)")
    parser.add_argument("--labels", nargs="*", default=None,
                        help="legend label per input, in order")
    parser.add_argument("--window", type=int, default=25,
                        help="trailing moving-average window (1 = raw)")
    parser.add_argument("--out", dest="outfile", required=True)
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    if args.window < 1:
        print("error: --window must be >= 1", file=sys.stderr)
        return 2
    labels = args.labels or [None] * len(args.infiles)
    if len(labels) != len(args.infiles):
        print(f"error: got {len(labels)} labels for {len(args.infiles)} "
              f"inputs", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        for i, (infile, label) in enumerate(zip(args.infiles, labels)):
            episodes, returns = load_curve(infile)
            color = LINE_COLORS[i % len(LINE_COLORS)]
            ax.plot(episodes, moving_average(returns, args.window),
                    color=color, linewidth=1.2, label=label)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        plt.close(fig)
        return 2

    ax.set_xlabel("episode")
    ax.set_ylabel(f"return (window {args.window})")
    if any(labels):
        ax.legend()
    if args.title:
        ax.set_title(args.title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    try:
        fig.savefig(args.outfile, dpi=120)
    except (OSError, ValueError) as exc:
        print(f"error: cannot write {args.outfile}: {exc}", file=sys.stderr)
        return 2
    finally:
        plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
