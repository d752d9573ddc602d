"""Self-describing network checkpoints (single ``.npz`` file).

The archive stores every parameter and running statistic plus a JSON
metadata record carrying the architecture, the feature-layout fields the
policy was trained with, and any caller extras.  Loading reconstructs the
network from the metadata and rejects shape mismatches.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .net import QNetwork

FORMAT_VERSION = 1


class CheckpointError(RuntimeError):
    """Raised when a checkpoint is missing, malformed, or incompatible."""


def save_checkpoint(path: str | Path, net: QNetwork,
                    extra: dict[str, Any] | None = None) -> None:
    meta = {
        "format_version": FORMAT_VERSION,
        "input_dim": net.input_dim,
        "action_count": net.action_count,
        "hidden": list(net.hidden),
        "dueling": net.dueling,
        "bn_eps": net.bn_eps,
        "bn_momentum": net.bn_momentum,
        "extra": extra or {},
    }
    arrays: dict[str, np.ndarray] = {"__meta__": np.array(json.dumps(meta))}
    for name, value in net.params.items():
        arrays[f"param/{name}"] = value
    for name, value in net.stats.items():
        arrays[f"stat/{name}"] = value
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path: str | Path) -> tuple[QNetwork, dict[str, Any]]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        archive = np.load(path, allow_pickle=False)
    except Exception as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    with archive:
        if "__meta__" not in archive:
            raise CheckpointError(f"{path} has no metadata record")
        try:
            meta = json.loads(str(archive["__meta__"]))
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"{path} metadata is not valid JSON") from exc
        for key in ("input_dim", "action_count", "hidden", "dueling"):
            if key not in meta:
                raise CheckpointError(f"{path} metadata lacks {key!r}")
        net = QNetwork(int(meta["input_dim"]), int(meta["action_count"]),
                       tuple(int(h) for h in meta["hidden"]),
                       bool(meta["dueling"]),
                       rng=np.random.default_rng(0),
                       bn_eps=float(meta.get("bn_eps", 1e-5)),
                       bn_momentum=float(meta.get("bn_momentum", 0.01)))
        for group, store in (("param", net.params), ("stat", net.stats)):
            for name, slot in store.items():
                key = f"{group}/{name}"
                if key not in archive:
                    raise CheckpointError(f"{path} lacks array {key}")
                value = archive[key]
                if value.shape != slot.shape:
                    raise CheckpointError(
                        f"{path}: {key} has shape {value.shape}, "
                        f"expected {slot.shape}")
                slot[...] = value
    return net, meta
