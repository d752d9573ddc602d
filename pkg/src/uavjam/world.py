"""Episode lifecycle: scenario generation, synchronized stepping of the
collector, traffic, and jammer, data-transfer accounting, termination,
and metric aggregation.

Conventions, all documented here because tests pin them:
- all actors move simultaneously against the pre-move snapshot;
- collisions use a cheap swept check (segment distance sampled at the
  endpoints and midpoint) with inclusive boundaries;
- the radio link for a step is resolved at the post-move positions with
  the emission schedule evaluated at the step's end instant, so the
  link stored on the state always describes "now";
- a mobile jammer that tries to leave the arena or enter a no-fly zone
  keeps its previous pose for that step (flagged, never terminal);
- the episode terminates only on the collector's own events: arrival,
  collision, no-fly entry, or deadline expiry.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .jammers import JammerKind, JammerSpec, JammerState, emission
from .motion import (
    Arena,
    KinematicLimits,
    Pose,
    Rect,
    Vec2,
    VelocityAction,
    integrate_motion,
    sample_velocity_set,
    segment_min_distance,
    violates_no_fly,
)
from .orca import OrcaAgent, orca_step
from .radio import (
    LinkReport,
    NodeMode,
    NodeState,
    RadioParams,
    aerial_jammer_interference,
    effective_rate,
    ground_jammer_interference,
    received_power,
    schedule,
    sinr,
)
from .rng import substream

_PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True)
class WorldConfig:
    arena: Arena
    node_count_range: tuple[int, int] = (5, 10)
    node_tx_power: float = 1e-2          # watts (10 dBm)
    initial_data: float = 200.0          # megabits per node
    typical_limits: KinematicLimits = KinematicLimits(2.0, math.pi / 3)
    typical_altitude: float = 50.0
    typical_radius: float = 0.5
    other_uav_count: int = 2
    other_radius: float = 0.5
    mission_deadline: float = 100.0      # seconds
    radio: RadioParams = RadioParams()
    jammer_spec: JammerSpec = JammerSpec()
    extra_jammers: tuple[JammerSpec, ...] = ()   # virtual emitters from defenses
    dt: float = 1.0
    k_speeds: int = 3
    m_headings: int = 7
    departure_area: Optional[Rect] = None
    landing_area: Optional[Rect] = None
    arrival_tolerance: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.node_count_range
        if not 1 <= lo <= hi:
            raise ValueError("node_count_range must satisfy 1 <= lo <= hi")
        if self.mission_deadline <= 0.0:
            raise ValueError("mission_deadline must be > 0")
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.initial_data <= 0.0:
            raise ValueError("initial_data must be > 0")
        if self.other_uav_count < 0:
            raise ValueError("other_uav_count must be >= 0")
        self.jammer_spec.validate_against(self.typical_altitude)
        for spec in self.extra_jammers:
            spec.validate_against(self.typical_altitude)

    @property
    def action_count(self) -> int:
        return self.k_speeds * self.m_headings + 1

    def departure(self) -> Rect:
        if self.departure_area is not None:
            return self.departure_area
        x0, x1 = self.arena.x_range
        y0, y1 = self.arena.y_range
        return Rect(x0, x0 + 0.1 * (x1 - x0), y0, y1)

    def landing(self) -> Rect:
        if self.landing_area is not None:
            return self.landing_area
        x0, x1 = self.arena.x_range
        y0, y1 = self.arena.y_range
        return Rect(x1 - 0.1 * (x1 - x0), x1, y0, y1)

    def tolerance(self) -> float:
        if self.arrival_tolerance is not None:
            return self.arrival_tolerance
        return self.typical_limits.v_max * self.dt

    def all_jammers(self) -> tuple[JammerSpec, ...]:
        specs = []
        if self.jammer_spec.kind is not JammerKind.NONE:
            specs.append(self.jammer_spec)
        specs.extend(self.extra_jammers)
        return tuple(specs)


@dataclass(frozen=True)
class StepEvents:
    collided: bool
    entered_no_fly: bool
    arrived: bool
    deadline_violated: bool
    data_delivered: float
    jammer_blocked: bool = False
    jammer_arrived: bool = False

    @property
    def terminal(self) -> bool:
        return (self.collided or self.entered_no_fly or self.arrived
                or self.deadline_violated)


@dataclass
class WorldState:
    config: WorldConfig
    typical: Pose
    destination: Vec2
    time_left: float
    others: list[OrcaAgent]
    nodes: list[NodeState]
    jammer_state: Optional[JammerState]
    jammer_destination: Optional[Vec2]
    link: LinkReport
    step_index: int = 0
    terminal: bool = False
    delivered_total: float = 0.0
    initial_total_data: float = 0.0
    jammer_history: list[Vec2] = field(default_factory=list)

    @property
    def elapsed(self) -> float:
        return self.step_index * self.config.dt

    def typical_actions(self) -> list[VelocityAction]:
        return sample_velocity_set(self.config.typical_limits,
                                   self.typical.heading, self.config.dt,
                                   self.config.k_speeds, self.config.m_headings)

    def jammer_actions(self) -> list[VelocityAction]:
        spec = self.config.jammer_spec
        if spec.kind is not JammerKind.INTELLIGENT or self.jammer_state is None:
            raise ValueError("world has no mobile jammer")
        return sample_velocity_set(spec.limits, self.jammer_state.pose.heading,
                                   self.config.dt, self.config.k_speeds,
                                   self.config.m_headings)


def _draw_point(rng: np.random.Generator, rect: Rect, arena: Arena) -> Vec2:
    for _ in range(_PLACEMENT_ATTEMPTS):
        p = Vec2(float(rng.uniform(rect.x_min, rect.x_max)),
                 float(rng.uniform(rect.y_min, rect.y_max)))
        if not violates_no_fly(p, arena):
            return p
    raise ValueError("placement area is infeasible (no-fly zones cover it)")


def _arena_rect(arena: Arena) -> Rect:
    return Rect(arena.x_range[0], arena.x_range[1],
                arena.y_range[0], arena.y_range[1])


def _jammer_interference(config: WorldConfig, state: WorldState,
                         at_position: Vec2, elapsed: float) -> float:
    total = 0.0
    for spec in config.all_jammers():
        power = emission(spec, elapsed)
        if power == 0.0:
            continue
        if spec.kind is JammerKind.INTELLIGENT:
            assert state.jammer_state is not None
            src = state.jammer_state.pose.position
            alt = spec.altitude
        else:
            src = spec.position
            alt = spec.altitude
        d = at_position.distance_to(src)
        if alt == 0.0:
            total += ground_jammer_interference(
                power, d, config.typical_altitude, config.radio.path_loss_exponent)
        else:
            total += aerial_jammer_interference(
                power, d, config.typical_altitude, alt,
                config.radio.path_loss_exponent)
    return total


def compute_link(state: WorldState, elapsed: Optional[float] = None) -> LinkReport:
    """Per-node received power and SINR at the collector's current
    position, the TDMA pick, and its effective rate."""
    config = state.config
    if elapsed is None:
        elapsed = state.elapsed
    pos = state.typical.position
    interference = _jammer_interference(config, state, pos, elapsed)
    noise = config.radio.noise_power
    received = []
    sinrs = []
    for node in state.nodes:
        d = pos.distance_to(node.position)
        p_r = received_power(node.tx_power, d, config.typical_altitude, config.radio)
        received.append(p_r)
        sinrs.append(sinr(p_r, interference, noise))
    modes = [n.mode for n in state.nodes]
    picked = schedule(sinrs, modes)
    rate = (effective_rate(sinrs[picked], config.radio.sinr_threshold)
            if picked is not None else 0.0)
    return LinkReport(tuple(received), tuple(sinrs), picked, rate)


def reset(config: WorldConfig, seed: int) -> WorldState:
    """Fresh randomized scenario.  Scenario layout and jammer randomness
    come from separate substreams so runs that differ only in jammer
    kind still see identical node/start/traffic draws."""
    scen = substream(seed, "scenario")
    arena = config.arena
    whole = _arena_rect(arena)

    lo, hi = config.node_count_range
    n_nodes = int(scen.integers(lo, hi + 1))
    nodes = [NodeState.fresh(_draw_point(scen, whole, arena),
                             config.node_tx_power, config.initial_data)
             for _ in range(n_nodes)]

    start = _draw_point(scen, config.departure(), arena)
    destination = _draw_point(scen, config.landing(), arena)
    heading = (destination - start).heading() if start != destination else 0.0
    typical = Pose(start, config.typical_altitude, Vec2(0.0, 0.0), heading,
                   config.typical_radius)

    others: list[OrcaAgent] = []
    for _ in range(config.other_uav_count):
        o_start = _draw_point(scen, whole, arena)
        o_goal = _draw_point(scen, whole, arena)
        o_heading = (o_goal - o_start).heading() if o_start != o_goal else 0.0
        pose = Pose(o_start, config.typical_altitude, Vec2(0.0, 0.0), o_heading,
                    config.other_radius)
        others.append(OrcaAgent(pose, o_goal, config.typical_limits.v_max,
                                neighbor_range=arena.sensing_radius))

    jammer_state = None
    jammer_destination = None
    spec = config.jammer_spec
    if spec.kind is JammerKind.INTELLIGENT:
        jrng = substream(seed, "jammer")
        j_start = spec.position if spec.position is not None else \
            _draw_point(jrng, config.departure(), arena)
        jammer_destination = spec.destination if spec.destination is not None else \
            _draw_point(jrng, config.landing(), arena)
        j_heading = ((jammer_destination - j_start).heading()
                     if j_start != jammer_destination else 0.0)
        pose = Pose(j_start, spec.altitude, Vec2(0.0, 0.0), j_heading, spec.radius)
        jammer_state = JammerState(
            pose=pose, emitting=True,
            time_left=spec.deadline if spec.deadline is not None
            else config.mission_deadline)

    state = WorldState(
        config=config,
        typical=typical,
        destination=destination,
        time_left=config.mission_deadline,
        others=others,
        nodes=nodes,
        jammer_state=jammer_state,
        jammer_destination=jammer_destination,
        link=LinkReport.empty(),
        initial_total_data=config.initial_data * n_nodes,
    )
    state.link = compute_link(state, elapsed=0.0)
    _record_jammer_position(state)
    return state


def _record_jammer_position(state: WorldState) -> None:
    spec = state.config.jammer_spec
    if spec.kind is JammerKind.INTELLIGENT:
        state.jammer_history.append(state.jammer_state.pose.position)
    elif spec.kind is not JammerKind.NONE:
        state.jammer_history.append(spec.position)


def jammer_position(state: WorldState) -> Optional[Vec2]:
    spec = state.config.jammer_spec
    if spec.kind is JammerKind.NONE:
        return None
    if spec.kind is JammerKind.INTELLIGENT:
        return state.jammer_state.pose.position
    return spec.position


def min_traffic_gap(old_a: Vec2, new_a: Vec2, radius_a: float,
                    moves: Sequence[tuple[Vec2, Vec2, float]]) -> Optional[tuple[float, float]]:
    """Smallest swept center distance between a moving disc and a set of
    moving discs, paired with that pair's radii sum."""
    best: Optional[tuple[float, float]] = None
    for old_b, new_b, radius_b in moves:
        d = segment_min_distance(old_a, new_a, old_b, new_b)
        if best is None or (d - (radius_a + radius_b)) < (best[0] - best[1]):
            best = (d, radius_a + radius_b)
    return best


def step(state: WorldState, typical_action: VelocityAction,
         jammer_action: Optional[VelocityAction] = None
         ) -> tuple[WorldState, StepEvents]:
    if state.terminal:
        raise RuntimeError("cannot step a terminal episode")
    config = state.config
    dt = config.dt
    arena = config.arena

    old_typical = state.typical
    old_others = [agent.pose for agent in state.others]

    new_typical = integrate_motion(old_typical, typical_action, dt)

    # traffic decides on the pre-move snapshot; collector counts as a neighbor
    new_other_poses = []
    for k, agent in enumerate(state.others):
        neighbor_poses = [p for i, p in enumerate(old_others) if i != k]
        neighbor_poses.append(old_typical)
        v = orca_step(agent, neighbor_poses, dt)
        new_other_poses.append(integrate_motion(
            agent.pose, VelocityAction(-1, v), dt))

    jammer_blocked = False
    jammer_arrived_now = False
    old_jammer_pos = jammer_position(state)
    spec = config.jammer_spec
    if spec.kind is JammerKind.INTELLIGENT:
        js = state.jammer_state
        if jammer_action is None:
            jammer_action = VelocityAction(-1, Vec2(0.0, 0.0))
        candidate = integrate_motion(js.pose, jammer_action, dt)
        if violates_no_fly(candidate.position, arena):
            jammer_blocked = True
            js.pose = Pose(js.pose.position, js.pose.altitude, Vec2(0.0, 0.0),
                           js.pose.heading, js.pose.radius)
        else:
            js.pose = candidate
        js.time_left -= dt
        tol = spec.limits.v_max * dt
        if (not js.arrived
                and js.pose.position.distance_to(state.jammer_destination) <= tol):
            js.arrived = True
            jammer_arrived_now = True

    # collision: swept check against every traffic UAV at the same height
    collided = False
    for old_p, new_p in zip(old_others, new_other_poses):
        d = segment_min_distance(old_typical.position, new_typical.position,
                                 old_p.position, new_p.position)
        if d <= new_typical.radius + old_p.radius:
            collided = True
            break

    entered_no_fly = violates_no_fly(new_typical.position, arena)
    arrived = new_typical.position.distance_to(state.destination) <= config.tolerance()
    new_time_left = state.time_left - dt
    deadline_violated = new_time_left <= 0.0 and not arrived

    state.typical = new_typical
    for agent, pose in zip(state.others, new_other_poses):
        agent.pose = pose
    state.time_left = new_time_left
    state.step_index += 1

    state.link = compute_link(state)
    delivered = 0.0
    picked = state.link.scheduled_node
    if picked is not None and state.link.effective_rate > 0.0:
        delivered = state.nodes[picked].drain(dt * state.link.effective_rate)
        if state.nodes[picked].mode is NodeMode.SILENT:
            # the pick is stale once the node empties this step
            state.link = compute_link(state)
    state.delivered_total += delivered

    _record_jammer_position(state)

    events = StepEvents(
        collided=collided,
        entered_no_fly=entered_no_fly,
        arrived=arrived,
        deadline_violated=deadline_violated,
        data_delivered=delivered,
        jammer_blocked=jammer_blocked,
        jammer_arrived=jammer_arrived_now,
    )
    state.terminal = events.terminal
    return state, events


@dataclass(frozen=True)
class EpisodeRecord:
    success: bool
    collected_fraction: float
    on_time: bool
    collision: bool
    total_reward: float


def finalize(history: Sequence[StepEvents], initial_total_data: float,
             total_reward: float = 0.0) -> EpisodeRecord:
    """Summarize a finished episode.  The accumulated return is supplied
    by the driver; it is not reconstructible from the events alone."""
    if not history or not history[-1].terminal:
        raise ValueError("episode is not terminal")
    arrived = any(e.arrived for e in history)
    collided = any(e.collided for e in history)
    no_fly = any(e.entered_no_fly for e in history)
    delivered = sum(e.data_delivered for e in history)
    on_time = arrived  # arrival is only ever flagged before the deadline
    success = arrived and on_time and not collided and not no_fly
    fraction = min(1.0, delivered / initial_total_data)
    return EpisodeRecord(success, fraction, on_time, collided, total_reward)


def aggregate(records: Sequence[EpisodeRecord]) -> dict:
    """SR/TR/CR over all episodes, DR over successful ones, percent scale."""
    if not records:
        raise ValueError("no episodes to aggregate")
    n = len(records)
    successes = [r for r in records if r.success]
    dr = (100.0 * sum(r.collected_fraction for r in successes) / len(successes)
          if successes else None)
    return {
        "sr": 100.0 * sum(r.success for r in records) / n,
        "dr": dr,
        "tr": 100.0 * sum(r.on_time for r in records) / n,
        "cr": 100.0 * sum(r.collision for r in records) / n,
        "mean_reward": sum(r.total_reward for r in records) / n,
        "episodes": n,
    }


TRAJECTORY_COLUMNS = ["step", "actor", "x", "y", "h", "vx", "vy",
                      "scheduled_node", "sinr", "data_delivered"]


def trajectory_rows(state: WorldState, step_index: int,
                    data_delivered: float) -> list[dict]:
    """One exportable row per actor for the current state."""
    rows = []
    link = state.link
    picked = link.scheduled_node
    rows.append({
        "step": step_index, "actor": "typical",
        "x": state.typical.position.x, "y": state.typical.position.y,
        "h": state.typical.altitude,
        "vx": state.typical.velocity.x, "vy": state.typical.velocity.y,
        "scheduled_node": picked if picked is not None else "",
        "sinr": link.sinr[picked] if picked is not None else "",
        "data_delivered": data_delivered,
    })
    for i, agent in enumerate(state.others):
        rows.append({
            "step": step_index, "actor": f"other{i}",
            "x": agent.pose.position.x, "y": agent.pose.position.y,
            "h": agent.pose.altitude,
            "vx": agent.pose.velocity.x, "vy": agent.pose.velocity.y,
            "scheduled_node": "", "sinr": "", "data_delivered": "",
        })
    pos = jammer_position(state)
    if pos is not None:
        spec = state.config.jammer_spec
        if spec.kind is JammerKind.INTELLIGENT:
            js = state.jammer_state
            vx, vy, alt = js.pose.velocity.x, js.pose.velocity.y, js.pose.altitude
        else:
            vx, vy, alt = 0.0, 0.0, spec.altitude
        rows.append({
            "step": step_index, "actor": "jammer",
            "x": pos.x, "y": pos.y, "h": alt, "vx": vx, "vy": vy,
            "scheduled_node": "", "sinr": "", "data_delivered": "",
        })
    return rows


def write_trajectory_csv(path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRAJECTORY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_metrics_json(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
