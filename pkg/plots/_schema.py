"""Strict loaders for the documented CSV schemas.

Each loader validates the header and every cell before anything is
plotted; violations raise SchemaError naming the offending column so the
scripts can exit nonzero with a useful message.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path


class SchemaError(ValueError):
    pass


REGION_COLUMNS = ("x", "y", "reliable")
CURVE_COLUMNS = ("episode", "steps", "return", "epsilon", "loss_mean")
TRAJECTORY_COLUMNS = ("step", "actor", "x", "y", "h", "vx", "vy",
                      "scheduled_node", "sinr", "data_delivered")


def _read_rows(path: str | Path, columns: tuple[str, ...]) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file") from None
    for column in columns:
        if column not in header:
            raise SchemaError(f"{path}: missing column '{column}'")
    for column in header:
        if column not in columns:
            raise SchemaError(f"{path}: unexpected column '{column}'")
    rows = []
    for lineno, values in enumerate(reader, start=2):
        if not values:
            continue
        if len(values) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} "
                              f"fields, got {len(values)}")
        rows.append(dict(zip(header, values)))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _number(row: dict, column: str, path, allow_blank: bool = False):
    raw = row[column]
    if raw == "":
        if allow_blank:
            return None
        raise SchemaError(f"{path}: blank value in column '{column}'")
    try:
        value = float(raw)
    except ValueError:
        raise SchemaError(
            f"{path}: non-numeric value {raw!r} in column '{column}'") from None
    return value


def load_region(path: str | Path):
    """Returns (xs sorted, ys sorted, bool grid[y][x]) from the row-major
    cell list."""
    rows = _read_rows(path, REGION_COLUMNS)
    cells = {}
    for row in rows:
        x = _number(row, "x", path)
        y = _number(row, "y", path)
        flag = row["reliable"]
        if flag not in ("0", "1"):
            raise SchemaError(f"{path}: column 'reliable' must be 0 or 1, "
                              f"got {flag!r}")
        cells[(x, y)] = flag == "1"
    xs = sorted({x for x, _ in cells})
    ys = sorted({y for _, y in cells})
    if len(cells) != len(xs) * len(ys):
        raise SchemaError(f"{path}: cells do not form a full x-y grid")
    grid = [[cells[(x, y)] for x in xs] for y in ys]
    return xs, ys, grid


def load_curve(path: str | Path):
    """Returns (episodes, returns) as parallel float lists."""
    rows = _read_rows(path, CURVE_COLUMNS)
    episodes, returns = [], []
    for row in rows:
        episodes.append(_number(row, "episode", path))
        returns.append(_number(row, "return", path))
        _number(row, "steps", path)
        _number(row, "epsilon", path)
        loss = _number(row, "loss_mean", path)
        if loss is not None and math.isinf(loss):
            raise SchemaError(f"{path}: non-finite value in column "
                              f"'loss_mean'")
    return episodes, returns


def load_trajectory(path: str | Path):
    """Returns {actor: [(x, y), ...]} in step order per actor."""
    rows = _read_rows(path, TRAJECTORY_COLUMNS)
    paths: dict[str, list] = {}
    for row in rows:
        step = _number(row, "step", path)
        if step != int(step) or step < 0:
            raise SchemaError(f"{path}: column 'step' must be a nonnegative "
                              f"integer, got {row['step']!r}")
        actor = row["actor"]
        if not actor:
            raise SchemaError(f"{path}: blank value in column 'actor'")
        x = _number(row, "x", path)
        y = _number(row, "y", path)
        for column in ("h", "vx", "vy"):
            _number(row, column, path)
        for column in ("scheduled_node", "sinr", "data_delivered"):
            _number(row, column, path, allow_blank=True)
        paths.setdefault(actor, []).append((step, x, y))
    return {actor: [(x, y) for _, x, y in sorted(points)]
            for actor, points in paths.items()}
