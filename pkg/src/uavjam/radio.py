"""LOS channel model, SINR, effective rate, TDMA scheduling, coverage maps.

All links are line-of-sight.  Path loss over horizontal distance d and
height difference h is (d^2 + h^2)^(alpha/2).  The UAV receiver has a
horizontally oriented antenna whose gain toward a ground point is
sin(elevation) = h / sqrt(d^2 + h^2); node and jammer antennas are
omnidirectional (unit gain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .motion import Vec2


@dataclass(frozen=True)
class RadioParams:
    path_loss_exponent: float = 2.0
    noise_power: float = 1.0e-7     # watts
    sinr_threshold: float = 3.5     # linear

    def __post_init__(self):
        if not self.path_loss_exponent > 0.0:
            raise ValueError("path_loss_exponent must be > 0")
        if not self.noise_power > 0.0:
            raise ValueError("noise_power must be > 0")
        if not self.sinr_threshold > 0.0:
            raise ValueError("sinr_threshold must be > 0")


class NodeMode(Enum):
    ACTIVE = "active"
    SILENT = "silent"


@dataclass
class NodeState:
    position: Vec2
    tx_power: float      # watts
    data_left: float     # megabits
    mode: NodeMode

    def __post_init__(self):
        if self.data_left < 0.0:
            raise ValueError("data_left must be >= 0")
        expected = NodeMode.SILENT if self.data_left == 0.0 else NodeMode.ACTIVE
        if self.mode is not expected:
            raise ValueError("mode must be silent iff data_left is zero")

    @classmethod
    def fresh(cls, position: Vec2, tx_power: float, data: float) -> "NodeState":
        mode = NodeMode.SILENT if data == 0.0 else NodeMode.ACTIVE
        return cls(position, tx_power, data, mode)

    def drain(self, amount: float) -> float:
        """Remove up to `amount` of data; flips to silent at zero.  Returns
        the amount actually removed."""
        taken = min(self.data_left, amount)
        self.data_left -= taken
        if self.data_left == 0.0:
            self.mode = NodeMode.SILENT
        return taken


@dataclass(frozen=True)
class LinkReport:
    """Radio bookkeeping for one step: per-node received power and SINR,
    the TDMA pick, and its effective rate (0 when below threshold)."""

    received_power: tuple[float, ...]
    sinr: tuple[float, ...]
    scheduled_node: Optional[int]
    effective_rate: float

    @classmethod
    def empty(cls) -> "LinkReport":
        return cls((), (), None, 0.0)


def path_loss(d: float, h: float, alpha: float) -> float:
    """(d^2 + h^2)^(alpha/2); undefined at zero separation."""
    if d < 0.0 or h < 0.0:
        raise ValueError("distances must be nonnegative")
    if d == 0.0 and h == 0.0:
        raise ValueError("path loss undefined at zero separation")
    return (d * d + h * h) ** (alpha / 2.0)


def antenna_gain(d: float, h: float) -> float:
    """sin(elevation) seen from the UAV's downward-facing receiver."""
    if h <= 0.0:
        raise ValueError("height difference must be > 0")
    if d < 0.0:
        raise ValueError("distance must be nonnegative")
    return h / math.sqrt(d * d + h * h)


def received_power(tx_power: float, d: float, h: float, params: RadioParams) -> float:
    return tx_power * antenna_gain(d, h) / path_loss(d, h, params.path_loss_exponent)


def ground_jammer_interference(p_j: float, d_jv: float, h_v: float, alpha: float) -> float:
    """Ground emitter at height 0 into the UAV's sine antenna pattern."""
    if h_v <= 0.0:
        raise ValueError("UAV altitude must be > 0")
    return p_j * h_v * (d_jv * d_jv + h_v * h_v) ** (-(alpha + 1.0) / 2.0)


def aerial_jammer_interference(p_j: float, d_jv: float, h_v: float, h_j: float,
                               alpha: float) -> float:
    """Airborne emitter at height h_j.  At exactly equal heights the sine
    antenna pattern nulls the interference, so this returns 0."""
    dh = h_v - h_j
    if dh == 0.0:
        return 0.0
    return p_j * abs(dh) * (d_jv * d_jv + dh * dh) ** (-(alpha + 1.0) / 2.0)


def sinr(received: float, interference: float, noise: float) -> float:
    if noise <= 0.0:
        raise ValueError("noise power must be > 0")
    if received < 0.0 or interference < 0.0:
        raise ValueError("powers must be nonnegative")
    return received / (noise + interference)


def effective_rate(s: float, threshold: float) -> float:
    """log2(1+s) when the link is reliable (s >= threshold), else 0."""
    if s < 0.0:
        raise ValueError("SINR must be nonnegative")
    if s >= threshold:
        return math.log2(1.0 + s)
    return 0.0


def schedule(sinrs: Sequence[float], modes: Sequence[NodeMode]) -> Optional[int]:
    """Largest-SINR TDMA pick among active nodes; ties go to the lowest
    node index; None when every node is silent."""
    if len(sinrs) != len(modes):
        raise ValueError("sinrs and modes must be aligned")
    best: Optional[int] = None
    for i, (s, mode) in enumerate(zip(sinrs, modes)):
        if mode is not NodeMode.ACTIVE:
            continue
        if best is None or s > sinrs[best]:
            best = i
    return best


@dataclass(frozen=True)
class RegionScene:
    """Static snapshot sufficient to evaluate reliability over a grid:
    node positions/powers/modes, the UAV altitude, and the jammer's
    current emission (power 0 means silent or absent)."""

    node_positions: tuple[Vec2, ...]
    node_tx_powers: tuple[float, ...]
    node_active: tuple[bool, ...]
    uav_altitude: float
    params: RadioParams
    jammer_position: Optional[Vec2] = None
    jammer_power: float = 0.0
    jammer_altitude: float = 0.0


def _interference_at(scene: RegionScene, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if scene.jammer_position is None or scene.jammer_power == 0.0:
        return np.zeros_like(x)
    dh = scene.uav_altitude - scene.jammer_altitude
    if dh == 0.0:
        return np.zeros_like(x)
    d2 = (x - scene.jammer_position.x) ** 2 + (y - scene.jammer_position.y) ** 2
    alpha = scene.params.path_loss_exponent
    return scene.jammer_power * abs(dh) * (d2 + dh * dh) ** (-(alpha + 1.0) / 2.0)


def best_sinr_field(scene: RegionScene, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Max over active nodes of the SINR a UAV would see at (x, y)."""
    interference = _interference_at(scene, x, y)
    denom = scene.params.noise_power + interference
    alpha = scene.params.path_loss_exponent
    h = scene.uav_altitude
    best = np.zeros_like(x)
    for pos, power, active in zip(scene.node_positions, scene.node_tx_powers,
                                  scene.node_active):
        if not active:
            continue
        d2 = (x - pos.x) ** 2 + (y - pos.y) ** 2
        signal = power * h * (d2 + h * h) ** (-(alpha + 1.0) / 2.0)
        np.maximum(best, signal / denom, out=best)
    return best


def reliable_region(scene: RegionScene, x_range: tuple[float, float],
                    y_range: tuple[float, float], resolution: float):
    """Boolean reliability grid over cell centers.

    Returns (xs, ys, grid) with grid[j, i] true iff the best active-node
    SINR at cell center (xs[i], ys[j]) meets the threshold under the
    scene's jammer emission.
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be > 0")
    nx = max(1, round((x_range[1] - x_range[0]) / resolution))
    ny = max(1, round((y_range[1] - y_range[0]) / resolution))
    xs = x_range[0] + resolution * (np.arange(nx) + 0.5)
    ys = y_range[0] + resolution * (np.arange(ny) + 0.5)
    gx, gy = np.meshgrid(xs, ys)
    grid = best_sinr_field(scene, gx, gy) >= scene.params.sinr_threshold
    return xs, ys, grid


def write_region_csv(path, xs: np.ndarray, ys: np.ndarray, grid: np.ndarray) -> None:
    """Row-major by y then x: header `x,y,reliable`, one row per cell."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,reliable\n")
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                fh.write(f"{x:.6g},{y:.6g},{int(grid[j, i])}\n")
