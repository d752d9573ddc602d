"""The collector UAV: observation pipeline, shaped reward, defense
mechanisms, and the jammer motion filter used when the jammer cannot be
sensed directly."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .features import Frame, polar
from .jammers import JammerKind, JammerSpec
from .motion import Pose, Vec2, violates_no_fly

if TYPE_CHECKING:
    from .world import WorldConfig, WorldState


@dataclass(frozen=True)
class RewardWeights:
    a1: float = 0.05    # per megabit collected
    a2: float = 25.0    # collision / proximity
    a3: float = 25.0    # no-fly entry
    a4: float = 1.0     # lateness pressure
    a5: float = 20.0    # arrival bonus
    a6: float = 0.1     # per-step cost
    a7: float = 10.0    # jammer proximity (jamming-aware mode)
    d_buffer: float = 4.0
    d_buffer2: float = 10.0

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a5", "a6", "a7",
                     "d_buffer", "d_buffer2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


class DefenseMode(Enum):
    NONE = "none"
    VIRTUAL_JAMMER = "virtual_jammer"
    HIGHER_THRESHOLD = "higher_threshold"
    INTELLIGENT = "intelligent"


@dataclass(frozen=True)
class DefenseConfig:
    mode: DefenseMode = DefenseMode.NONE
    virtual_position: Vec2 = Vec2(0.0, 0.0)
    virtual_power: float = 1e-3 / 3.0
    threshold_boost: float = 0.4
    jammer_history_len: int = 4
    use_velocity_filter: bool = False   # estimate the jammer outside sensing range

    def __post_init__(self):
        if self.mode is DefenseMode.HIGHER_THRESHOLD and self.threshold_boost <= 0.0:
            raise ValueError("higher_threshold mode needs threshold_boost > 0")
        if self.jammer_history_len < 0:
            raise ValueError("jammer_history_len must be >= 0")


@dataclass(frozen=True)
class UavObservation:
    """World-frame snapshot of everything the collector may use."""

    pose: Pose
    destination: Vec2
    v_max: float
    time_left: float
    deadline: float
    others: tuple[Pose, ...]               # same-altitude traffic in sensing range
    node_positions: tuple[Vec2, ...]       # every node, silent ones included
    node_data: tuple[float, ...]
    node_received: tuple[float, ...]
    initial_data: float
    received_ref: float                    # overhead received power, for scaling
    jammer_track: Optional[tuple[Vec2, ...]] = None  # jamming-aware mode only


def uav_observe(world: "WorldState",
                jammer_track: Optional[Sequence[Vec2]] = None) -> UavObservation:
    """Raw observation.  The jammer never appears unless the caller
    passes an explicit believed track (jamming-aware defense)."""
    from .radio import received_power

    config = world.config
    sensing = config.arena.sensing_radius
    pos = world.typical.position
    others = tuple(a.pose for a in world.others
                   if a.pose.altitude == world.typical.altitude
                   and pos.distance_to(a.pose.position) <= sensing)
    ref = received_power(config.node_tx_power, 0.0, config.typical_altitude,
                         config.radio)
    return UavObservation(
        pose=world.typical,
        destination=world.destination,
        v_max=config.typical_limits.v_max,
        time_left=world.time_left,
        deadline=config.mission_deadline,
        others=others,
        node_positions=tuple(n.position for n in world.nodes),
        node_data=tuple(n.data_left for n in world.nodes),
        node_received=world.link.received_power,
        initial_data=config.initial_data,
        received_ref=ref,
        jammer_track=tuple(jammer_track) if jammer_track is not None else None,
    )


def uav_feature_length(defense: DefenseConfig, j_pad: int = 4,
                       n_pad: int = 10) -> int:
    base = 9 + 7 * j_pad + 6 * n_pad + 1
    if defense.mode is DefenseMode.INTELLIGENT:
        base += 2 * (defense.jammer_history_len + 1)
    return base


def uav_featurize(obs: UavObservation, defense: DefenseConfig,
                  j_pad: int = 4, n_pad: int = 10) -> np.ndarray:
    """Collector-centric feature vector.

    Layout: own block (9), j_pad traffic blocks (7 each, nearest first,
    zero padded), n_pad node blocks (6 each, strongest received power
    first, zero padded), remaining-time fraction; jamming-aware mode
    appends the believed jammer track, oldest first, as local positions.
    """
    frame = Frame.toward(obs.pose.position, obs.destination)
    out: list[float] = []

    v = frame.rotate(obs.pose.velocity)
    goal = frame.to_local(obs.destination)
    d_g, a_g = polar(goal)
    out += [v.x, v.y, goal.x, goal.y, d_g, a_g, obs.pose.radius, obs.v_max,
            frame.local_heading(obs.pose.heading)]

    ranked = sorted(obs.others,
                    key=lambda p: obs.pose.position.distance_to(p.position))
    for i in range(j_pad):
        if i < len(ranked):
            nb = ranked[i]
            p = frame.to_local(nb.position)
            nv = frame.rotate(nb.velocity)
            d, a = polar(p)
            out += [p.x, p.y, nv.x, nv.y, d, a, nb.radius]
        else:
            out += [0.0] * 7

    order = sorted(range(len(obs.node_positions)),
                   key=lambda i: (-obs.node_received[i], i))
    ref = obs.received_ref if obs.received_ref > 0.0 else 1.0
    for k in range(n_pad):
        if k < len(order):
            i = order[k]
            p = frame.to_local(obs.node_positions[i])
            d, a = polar(p)
            out += [p.x, p.y, d, a,
                    obs.node_data[i] / obs.initial_data,
                    obs.node_received[i] / ref]
        else:
            out += [0.0] * 6

    out.append(obs.time_left / obs.deadline if obs.deadline > 0 else 0.0)

    if defense.mode is DefenseMode.INTELLIGENT:
        frames_needed = defense.jammer_history_len + 1
        track = list(obs.jammer_track or ())
        if not track:
            track = [obs.pose.position]  # degenerate: no information
        track = [track[0]] * (frames_needed - len(track)) + track
        for p in track[-frames_needed:]:
            local = frame.to_local(p)
            out += [local.x, local.y]

    vec = np.asarray(out, dtype=np.float64)
    if vec.shape[0] != uav_feature_length(defense, j_pad, n_pad):
        raise AssertionError("feature layout drifted from declared length")
    return vec


@dataclass(frozen=True)
class RewardBreakdown:
    data: float
    collision: float
    no_fly: float
    time: float
    arrival: float
    step: float
    jammer_avoid: float = 0.0

    @property
    def total(self) -> float:
        return (self.data + self.collision + self.no_fly + self.time
                + self.arrival + self.step + self.jammer_avoid)


def proximity_penalty(min_gap: Optional[tuple[float, float]],
                      a2: float, d_buffer: float) -> float:
    """Piecewise-linear repulsion: -a2 at touching distance, fading to 0
    across the buffer."""
    if min_gap is None:
        return 0.0
    d, rr = min_gap
    if d <= rr:
        return -a2
    if d <= rr + d_buffer:
        return -a2 * (1.0 - (d - rr) / d_buffer)
    return 0.0


def uav_reward(
    data_delivered: float,
    min_gap: Optional[tuple[float, float]],   # (swept center distance, radii sum)
    entered_no_fly: bool,
    arrived: bool,
    time_left_next: float,
    dist_to_goal_next: float,
    v_max: float,
    weights: RewardWeights,
    defense: DefenseConfig,
    d_jv_next: Optional[float] = None,
) -> RewardBreakdown:
    r_data = weights.a1 * data_delivered
    r_col = proximity_penalty(min_gap, weights.a2, weights.d_buffer)
    r_ofly = -weights.a3 if entered_no_fly else 0.0
    t_min = dist_to_goal_next / v_max
    r_time = (weights.a4 * (time_left_next - t_min)
              if time_left_next < t_min else 0.0)
    r_goal = weights.a5 if arrived else 0.0
    r_step = -weights.a6

    r_jam = 0.0
    if defense.mode is DefenseMode.INTELLIGENT and d_jv_next is not None:
        if d_jv_next <= weights.d_buffer2:
            r_jam = -weights.a7 * (1.0 - d_jv_next / weights.d_buffer2)

    return RewardBreakdown(data=r_data, collision=r_col, no_fly=r_ofly,
                           time=r_time, arrival=r_goal, step=r_step,
                           jammer_avoid=r_jam)


def apply_defense(config: "WorldConfig", defense: DefenseConfig) -> "WorldConfig":
    """Training-world variant of a config.  Evaluation always runs on the
    original config; only training sees the virtual emitter or the
    stiffened link threshold."""
    if defense.mode is DefenseMode.VIRTUAL_JAMMER:
        if violates_no_fly(defense.virtual_position, config.arena):
            raise ValueError("virtual jammer position is not flyable space")
        virtual = JammerSpec(kind=JammerKind.CONTINUOUS,
                             position=defense.virtual_position,
                             altitude=0.0,
                             tx_power=defense.virtual_power)
        return dataclasses.replace(
            config, extra_jammers=config.extra_jammers + (virtual,))
    if defense.mode is DefenseMode.HIGHER_THRESHOLD:
        radio = dataclasses.replace(
            config.radio,
            sinr_threshold=config.radio.sinr_threshold + defense.threshold_boost)
        return dataclasses.replace(config, radio=radio)
    return config


def suggest_virtual_position(node_positions: Sequence[Vec2]) -> Vec2:
    """Centroid of the node group; a sensible default virtual-emitter
    location when the real attack position is unknown."""
    if not node_positions:
        raise ValueError("no nodes")
    x = sum(p.x for p in node_positions) / len(node_positions)
    y = sum(p.y for p in node_positions) / len(node_positions)
    return Vec2(x, y)


def estimate_jammer_motion(velocities: Sequence[Vec2], last_position: Vec2,
                           dt: float, prev_heading: float = 0.0
                           ) -> tuple[Vec2, Vec2, float]:
    """Constant-velocity extrapolation from a velocity history: the
    estimate is the plain mean, the predicted position one step ahead,
    and the implied heading (previous heading when the mean is zero)."""
    if not velocities:
        raise ValueError("velocity history is empty")
    vx = sum(v.x for v in velocities) / len(velocities)
    vy = sum(v.y for v in velocities) / len(velocities)
    v_hat = Vec2(vx, vy)
    p_hat = Vec2(last_position.x + vx * dt, last_position.y + vy * dt)
    heading = math.atan2(vy, vx) if v_hat.norm() > 0.0 else prev_heading
    return v_hat, p_hat, heading


class JammerTracker:
    """Belief over the jammer's position for the jamming-aware defense.

    Inside the sensing region the belief is the true position.  Outside
    (and only when the filter is enabled) the belief advances by the
    mean of the recent believed velocities; with the filter disabled the
    belief freezes at the last sighting.
    """

    def __init__(self, history_len: int, dt: float, use_filter: bool):
        if history_len < 1:
            raise ValueError("history_len must be >= 1")
        self.history_len = history_len
        self.dt = dt
        self.use_filter = use_filter
        self.positions: list[Vec2] = []
        self.heading = 0.0

    def update(self, observed: Optional[Vec2]) -> Vec2:
        """Fold in one step; `observed` is None when the jammer is not
        sensible this step.  Returns the current believed position."""
        if observed is not None:
            belief = observed
        elif not self.positions:
            belief = Vec2(0.0, 0.0)   # never seen: no information at all
        elif self.use_filter and len(self.positions) >= 2:
            recent = self.positions[-(self.history_len + 1):]
            vels = [(b - a) * (1.0 / self.dt)
                    for a, b in zip(recent[:-1], recent[1:])]
            _, belief, self.heading = estimate_jammer_motion(
                vels, self.positions[-1], self.dt, self.heading)
        else:
            belief = self.positions[-1]
        self.positions.append(belief)
        return belief

    def track(self, frames: int) -> tuple[Vec2, ...]:
        """Last `frames` believed positions, oldest first, front-padded
        by repetition."""
        if not self.positions:
            raise ValueError("tracker has no history")
        out = self.positions[-frames:]
        out = [out[0]] * (frames - len(out)) + out
        return tuple(out)
