#!/usr/bin/env python3
"""Render flight paths from a trajectory CSV (columns step,actor,x,y,h,
vx,vy,scheduled_node,sinr,data_delivered).

Paths are dotted lines: the typical UAV in black, other UAVs in red, the
jammer in orange.  The jammer's final position gets a marker, sensor nodes
can be added with repeated --node, and --region overlays a coverage map.

    python3 plots/plot_trajectory.py --in traj.csv --region region.csv \
        --node 12,7 --node -3,10 --out traj.png
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from _schema import SchemaError, load_region, load_trajectory
from plot_region import draw_region

ACTOR_STYLE = {"typical": "black", "other": "red", "jammer": "orange"}


def actor_color(actor):
    if actor in ACTOR_STYLE:
        return ACTOR_STYLE[actor]
    if actor.startswith("other"):
        return ACTOR_STYLE["other"]
    return "gray"


def parse_node(text):
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected x,y coordinates, got {text!r}") from None
    return x, y


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infile", required=True,
                        help="trajectory CSV")
    parser.add_argument("--region", default=None,
                        help="optional region CSV drawn under the paths")
    parser.add_argument("--node", dest="nodes", type=parse_node,
                        action="append", default=[],
                        help="sensor-node marker at x,y (repeatable)")
    parser.add_argument("--out", dest="outfile", required=True)
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    try:
        paths = load_trajectory(args.infile)
        region = load_region(args.region) if args.region else None
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(6, 6))
    if region is not None:
        draw_region(ax, *region, alpha=0.5)
    for actor in sorted(paths):
        points = paths[actor]
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        color = actor_color(actor)
        ax.plot(xs, ys, linestyle=":", linewidth=1.4, color=color,
                label=actor)
        ax.plot(xs[0], ys[0], marker="o", markersize=4, color=color)
        if actor == "jammer":
            ax.plot(xs[-1], ys[-1], marker="X", markersize=9, color=color)
    for x, y in args.nodes:
        ax.plot(x, y, marker="s", markersize=6, color="tab:blue")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best", fontsize=8)
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
