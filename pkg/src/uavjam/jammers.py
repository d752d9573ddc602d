"""Jamming attack strategies.

Three attack kinds: a continuous emitter at a fixed position, a
periodic emitter that alternates a high-power on-window with silence
under an energy budget shared with the continuous one, and a mobile
learning jammer that flies at its own altitude, chases the collector,
and lands at its own destination under its own deadline.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .features import Frame, polar
from .motion import KinematicLimits, Pose, Vec2

if TYPE_CHECKING:
    from .world import WorldState


class JammerKind(Enum):
    NONE = "none"
    CONTINUOUS = "continuous"
    PERIODIC = "periodic"
    INTELLIGENT = "intelligent"


@dataclass(frozen=True)
class JammerSpec:
    kind: JammerKind = JammerKind.NONE
    position: Optional[Vec2] = None          # fixed kinds: location; intelligent: start
    destination: Optional[Vec2] = None       # intelligent only
    altitude: float = 0.0                    # 0 = ground emitter
    tx_power: float = 0.0
    period_on: float = 40.0                  # high-power window, periodic only
    period_total: float = 60.0
    limits: Optional[KinematicLimits] = None  # intelligent only
    deadline: Optional[float] = None          # intelligent mission deadline
    history_len: int = 4                      # past frames kept for featurization
    radius: float = 0.5
    sinr_floor: float = 0.1                   # collector SINR below this stops paying

    def __post_init__(self):
        if self.kind in (JammerKind.CONTINUOUS, JammerKind.PERIODIC):
            if self.position is None:
                raise ValueError(f"{self.kind.value} jammer needs a position")
            if self.tx_power <= 0.0:
                raise ValueError(f"{self.kind.value} jammer needs tx_power > 0")
        if self.kind is JammerKind.PERIODIC:
            if not 0.0 < self.period_on <= self.period_total:
                raise ValueError("period_on must be in (0, period_total]")
        if self.kind is JammerKind.INTELLIGENT:
            if self.tx_power <= 0.0:
                raise ValueError("intelligent jammer needs tx_power > 0")
            if self.limits is None:
                raise ValueError("intelligent jammer needs kinematic limits")
            if self.altitude <= 0.0:
                raise ValueError("intelligent jammer flies at a positive altitude")
        if self.history_len < 0:
            raise ValueError("history_len must be >= 0")
        if self.altitude < 0.0:
            raise ValueError("altitude must be >= 0")

    def validate_against(self, typical_altitude: float) -> None:
        """Equal altitudes null the collector's antenna toward the jammer,
        so an airborne jammer at the collector's height is a config error."""
        if self.kind is JammerKind.INTELLIGENT and self.altitude == typical_altitude:
            raise ValueError("intelligent jammer altitude must differ from "
                             "the collector's altitude")


@dataclass
class JammerState:
    pose: Pose
    emitting: bool
    time_left: float
    arrived: bool = False


def emission(spec: JammerSpec, elapsed: float) -> float:
    """Transmit power at `elapsed` seconds into the episode."""
    if elapsed < 0.0:
        raise ValueError("elapsed must be >= 0")
    if spec.kind is JammerKind.NONE:
        return 0.0
    if spec.kind is JammerKind.CONTINUOUS:
        return spec.tx_power
    if spec.kind is JammerKind.PERIODIC:
        return spec.tx_power if (elapsed % spec.period_total) < spec.period_on else 0.0
    return spec.tx_power  # intelligent: emits while airborne


@dataclass(frozen=True)
class JammerObservation:
    """Everything the mobile jammer senses in one step, in world frame."""

    pose: Pose
    destination: Vec2
    v_max: float
    time_left: float
    deadline: float
    neighbors: tuple[Pose, ...]              # same-altitude traffic in sensing range
    typical_position: Vec2
    typical_altitude: float
    typical_velocity: Vec2
    typical_radius: float
    node_positions: tuple[Vec2, ...]         # active nodes only


def jammer_observe(world: "WorldState", spec: JammerSpec) -> JammerObservation:
    if spec.kind is not JammerKind.INTELLIGENT:
        raise ValueError("only the intelligent jammer observes")
    js = world.jammer_state
    if js is None:
        raise ValueError("world has no mobile jammer")
    sensing = world.config.arena.sensing_radius
    neighbors = tuple(
        agent.pose for agent in world.others
        if agent.pose.altitude == spec.altitude
        and js.pose.position.distance_to(agent.pose.position) <= sensing
    )
    active = tuple(n.position for n in world.nodes if n.data_left > 0.0)
    tp = world.typical
    return JammerObservation(
        pose=js.pose,
        destination=world.jammer_destination,
        v_max=spec.limits.v_max,
        time_left=js.time_left,
        deadline=spec.deadline if spec.deadline is not None
        else world.config.mission_deadline,
        neighbors=neighbors,
        typical_position=tp.position,
        typical_altitude=tp.altitude,
        typical_velocity=tp.velocity,
        typical_radius=tp.radius,
        node_positions=active,
    )


def jammer_feature_length(history_len: int, j_pad: int = 4, n_pad: int = 10) -> int:
    return 9 + 7 * j_pad + (history_len + 1) * (5 + 4 * n_pad) + 1


def jammer_featurize(history: Sequence[JammerObservation], spec: JammerSpec,
                     j_pad: int = 4, n_pad: int = 10) -> np.ndarray:
    """Fixed-length vector from the newest observation plus history_len
    older frames (shorter histories repeat the oldest frame).

    Layout: own block (9), j_pad neighbor blocks (7 each, nearest first,
    zero padded), history_len+1 frames of [collector block (5), n_pad
    node blocks (4 each, nearest-to-collector first, zero padded)]
    oldest first, then the remaining-time fraction.
    """
    if not history:
        raise ValueError("history must be nonempty")
    frames_needed = spec.history_len + 1
    padded = [history[0]] * (frames_needed - len(history)) + list(history)
    padded = padded[-frames_needed:]
    cur = padded[-1]

    frame = Frame.toward(cur.pose.position, cur.destination)
    out: list[float] = []

    v = frame.rotate(cur.pose.velocity)
    goal = frame.to_local(cur.destination)
    d_g, a_g = polar(goal)
    out += [v.x, v.y, goal.x, goal.y, d_g, a_g, cur.pose.radius, cur.v_max,
            frame.local_heading(cur.pose.heading)]

    ranked = sorted(cur.neighbors,
                    key=lambda p: cur.pose.position.distance_to(p.position))
    for i in range(j_pad):
        if i < len(ranked):
            nb = ranked[i]
            p = frame.to_local(nb.position)
            nv = frame.rotate(nb.velocity)
            d, a = polar(p)
            out += [p.x, p.y, nv.x, nv.y, d, a, nb.radius]
        else:
            out += [0.0] * 7

    for obs in padded:
        tp = frame.to_local(obs.typical_position)
        tv = frame.rotate(obs.typical_velocity)
        out += [tp.x, tp.y, obs.typical_altitude - cur.pose.altitude, tv.x, tv.y]
        by_dist = sorted(
            obs.node_positions,
            key=lambda n: (n.distance_to(obs.typical_position), n.x, n.y))
        for i in range(n_pad):
            if i < len(by_dist):
                node = by_dist[i]
                p = frame.to_local(node)
                rel = frame.rotate(node - obs.typical_position)
                d_v, a_v = polar(rel)
                out += [p.x, p.y, d_v, a_v]
            else:
                out += [0.0] * 4

    out.append(cur.time_left / cur.deadline if cur.deadline > 0 else 0.0)
    vec = np.asarray(out, dtype=np.float64)
    if vec.shape[0] != jammer_feature_length(spec.history_len, j_pad, n_pad):
        raise AssertionError("feature layout drifted from declared length")
    return vec


@dataclass(frozen=True)
class JammerRewardBreakdown:
    sinr: float
    collision: float
    no_fly: float
    time: float
    arrival: float
    approach: float

    @property
    def total(self) -> float:
        return (self.sinr + self.collision + self.no_fly + self.time
                + self.arrival + self.approach)


def jammer_reward(
    typical_sinr_next: Optional[float],
    d_jv_prev: float,
    d_jv_next: float,
    min_traffic_gap: Optional[tuple[float, float]],  # (center distance, radii sum)
    no_fly: bool,
    arrived: bool,
    time_left_next: float,
    dist_to_goal_next: float,
    weights,
    spec: JammerSpec,
) -> JammerRewardBreakdown:
    """Per-step reward for the mobile jammer.

    Pays inversely in the collector's link quality when the link is
    still above the floor, mirrors the collector's collision / boundary
    / timeliness / arrival terms with the jammer's own weights, and
    adds the raw distance closed toward the collector this step.  No
    per-step movement penalty.
    """
    if typical_sinr_next is not None and typical_sinr_next > spec.sinr_floor:
        r_sinr = weights.a1 / typical_sinr_next
    else:
        r_sinr = 0.0

    r_col = 0.0
    if min_traffic_gap is not None:
        d, rr = min_traffic_gap
        if d <= rr:
            r_col = -weights.a2
        elif d <= rr + weights.d_buffer:
            r_col = -weights.a2 * (1.0 - (d - rr) / weights.d_buffer)

    r_ofly = -weights.a3 if no_fly else 0.0

    assert spec.limits is not None
    t_min = dist_to_goal_next / spec.limits.v_max
    r_time = weights.a4 * (time_left_next - t_min) if time_left_next < t_min else 0.0

    r_goal = weights.a5 if arrived else 0.0

    return JammerRewardBreakdown(
        sinr=r_sinr, collision=r_col, no_fly=r_ofly, time=r_time,
        arrival=r_goal, approach=d_jv_prev - d_jv_next,
    )
