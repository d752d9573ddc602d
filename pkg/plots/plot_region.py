#!/usr/bin/env python3
"""Render a reliable-coverage map from a region CSV (columns x,y,reliable).

Reliable cells are drawn as a filled area; unreliable cells stay white.

    python3 plots/plot_region.py --in region.csv --out region.png
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from _schema import SchemaError, load_region

REGION_FILL = "#9ecadb"


def region_extent(xs, ys):
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    return (xs[0] - dx / 2, xs[-1] + dx / 2, ys[0] - dy / 2, ys[-1] + dy / 2)


def draw_region(ax, xs, ys, grid, alpha=1.0):
    """Fill reliable cells on `ax`; y grows upward (origin lower-left)."""
    mask = np.array(grid, dtype=float)
    cmap = matplotlib.colors.ListedColormap(["white", REGION_FILL])
    ax.imshow(mask, origin="lower", extent=region_extent(xs, ys),
              cmap=cmap, vmin=0.0, vmax=1.0, alpha=alpha,
              interpolation="nearest", aspect="equal")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infile", required=True,
                        help="region CSV with columns x,y,reliable")
    parser.add_argument("--out", dest="outfile", required=True,
                        help="output image path (extension picks the format)")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    try:
        xs, ys, grid = load_region(args.infile)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(6, 6))
    draw_region(ax, xs, ys, grid)
    ax.set_xlim(region_extent(xs, ys)[:2])
    ax.set_ylim(region_extent(xs, ys)[2:])
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    if args.title:
        ax.set_title(args.title)
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
