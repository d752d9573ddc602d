"""Environment adapters: wrap the simulation world as step/reset tasks
the training loop and the greedy evaluator consume.

``UavTask`` trains or evaluates the data collector.  Fixed emitters need
no opposing policy; a trained mobile jammer is injected as a frozen
greedy driver.  ``JammerTask`` trains the mobile jammer against a frozen
collector policy.  Retraining a defense is just ``UavTask`` with the
corresponding defense configuration (and, for the jamming-aware mode, a
frozen jammer driver).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import world
from .agent import (
    DefenseConfig,
    DefenseMode,
    JammerTracker,
    RewardWeights,
    apply_defense,
    uav_feature_length,
    uav_featurize,
    uav_observe,
    uav_reward,
)
from .jammers import (
    JammerKind,
    JammerObservation,
    JammerSpec,
    jammer_feature_length,
    jammer_featurize,
    jammer_observe,
    jammer_reward,
)
from .learner.net import QNetwork
from .learner.policy import greedy_action
from .motion import Vec2, VelocityAction
from .world import StepEvents, WorldConfig, WorldState


class JammerDriver:
    """Greedy mobile-jammer controller built from a trained network."""

    def __init__(self, net: QNetwork, spec: JammerSpec,
                 j_pad: int = 4, n_pad: int = 10) -> None:
        if spec.kind is not JammerKind.INTELLIGENT:
            raise ValueError("only the mobile jammer takes a driver")
        expected = jammer_feature_length(spec.history_len, j_pad, n_pad)
        if net.input_dim != expected:
            raise ValueError(
                f"jammer network expects {net.input_dim} features, the "
                f"configured jammer produces {expected}")
        self.net = net
        self.spec = spec
        self.j_pad = j_pad
        self.n_pad = n_pad
        self.history: list[JammerObservation] = []

    def reset(self) -> None:
        self.history = []

    def observe(self, state: WorldState) -> None:
        self.history.append(jammer_observe(state, self.spec))
        keep = self.spec.history_len + 1
        if len(self.history) > keep:
            del self.history[:-keep]

    def act(self, state: WorldState) -> VelocityAction:
        features = jammer_featurize(self.history, self.spec,
                                    self.j_pad, self.n_pad)
        return state.jammer_actions()[greedy_action(self.net.q_values(features))]


class FrozenUavPolicy:
    """Greedy collector controller used while training the jammer."""

    def __init__(self, net: QNetwork, defense: DefenseConfig,
                 j_pad: int = 4, n_pad: int = 10) -> None:
        expected = uav_feature_length(defense, j_pad, n_pad)
        if net.input_dim != expected:
            raise ValueError(
                f"collector network expects {net.input_dim} features, the "
                f"defense configuration produces {expected}")
        self.net = net
        self.defense = defense
        self.j_pad = j_pad
        self.n_pad = n_pad
        self.tracker: Optional[JammerTracker] = None

    def reset(self, state: WorldState) -> None:
        if self.defense.mode is DefenseMode.INTELLIGENT:
            self.tracker = JammerTracker(self.defense.jammer_history_len,
                                         state.config.dt,
                                         self.defense.use_velocity_filter)
            self.tracker.update(_jammer_sighting(state, self.defense))
        else:
            self.tracker = None

    def observe(self, state: WorldState) -> None:
        if self.tracker is not None:
            self.tracker.update(_jammer_sighting(state, self.defense))

    def act(self, state: WorldState) -> VelocityAction:
        track = (self.tracker.track(self.defense.jammer_history_len + 1)
                 if self.tracker is not None else None)
        obs = uav_observe(state, track)
        features = uav_featurize(obs, self.defense, self.j_pad, self.n_pad)
        return state.typical_actions()[greedy_action(self.net.q_values(features))]


def _jammer_sighting(state: WorldState,
                     defense: DefenseConfig) -> Optional[Vec2]:
    """What the defense can see of the jammer this step: with the filter
    disabled the true position is known outright; with it enabled, only
    sightings inside the sensing region come through."""
    pos = world.jammer_position(state)
    if pos is None:
        return None
    if not defense.use_velocity_filter:
        return pos
    if state.typical.position.distance_to(pos) <= state.config.arena.sensing_radius:
        return pos
    return None


def _moves_at_altitude(old_poses, new_poses, altitude: float):
    return [(op.position, np_.position, np_.radius)
            for op, np_ in zip(old_poses, new_poses)
            if np_.altitude == altitude]


class UavTask:
    """Collector control task: reward shaping, features, defenses, and
    optional trajectory capture around the simulation world."""

    def __init__(self, config: WorldConfig,
                 weights: RewardWeights = RewardWeights(),
                 defense: DefenseConfig = DefenseConfig(DefenseMode.NONE),
                 jammer_net: Optional[QNetwork] = None,
                 j_pad: int = 4, n_pad: int = 10,
                 collect_trajectory: bool = False) -> None:
        self.config = apply_defense(config, defense)
        self.weights = weights
        self.defense = defense
        self.j_pad = j_pad
        self.n_pad = n_pad
        self.collect_trajectory = collect_trajectory
        self.driver: Optional[JammerDriver] = None
        if jammer_net is not None:
            self.driver = JammerDriver(jammer_net, self.config.jammer_spec,
                                       j_pad, n_pad)
        self.state: Optional[WorldState] = None
        self.tracker: Optional[JammerTracker] = None
        self.history: list[StepEvents] = []
        self.total_reward = 0.0
        self.trajectory: list[dict] = []
        self.completed_trajectories: list[list[dict]] = []

    @property
    def action_count(self) -> int:
        return self.config.action_count

    @property
    def feature_length(self) -> int:
        return uav_feature_length(self.defense, self.j_pad, self.n_pad)

    def _features(self) -> np.ndarray:
        assert self.state is not None
        track = (self.tracker.track(self.defense.jammer_history_len + 1)
                 if self.tracker is not None else None)
        return uav_featurize(uav_observe(self.state, track), self.defense,
                             self.j_pad, self.n_pad)

    def reset(self, seed: int) -> np.ndarray:
        self.state = world.reset(self.config, seed)
        self.history = []
        self.total_reward = 0.0
        if self.defense.mode is DefenseMode.INTELLIGENT:
            self.tracker = JammerTracker(self.defense.jammer_history_len,
                                         self.config.dt,
                                         self.defense.use_velocity_filter)
            self.tracker.update(_jammer_sighting(self.state, self.defense))
        else:
            self.tracker = None
        if self.driver is not None:
            self.driver.reset()
            self.driver.observe(self.state)
        if self.collect_trajectory:
            self.trajectory = world.trajectory_rows(self.state, 0, 0.0)
        return self._features()

    def step(self, action: int) -> tuple[np.ndarray, float, bool, dict]:
        assert self.state is not None
        state = self.state
        typical_action = state.typical_actions()[action]
        jammer_action = None
        if self.driver is not None:
            jammer_action = self.driver.act(state)

        old_typical = state.typical.position
        old_others = [a.pose for a in state.others]
        state, events = world.step(state, typical_action, jammer_action)

        moves = _moves_at_altitude(old_others, [a.pose for a in state.others],
                                   state.typical.altitude)
        min_gap = world.min_traffic_gap(old_typical, state.typical.position,
                                        state.typical.radius, moves)

        d_jv_next = None
        if self.tracker is not None:
            belief = self.tracker.update(_jammer_sighting(state, self.defense))
            d_jv_next = belief.distance_to(state.typical.position)
        if self.driver is not None:
            self.driver.observe(state)

        breakdown = uav_reward(
            data_delivered=events.data_delivered,
            min_gap=min_gap,
            entered_no_fly=events.entered_no_fly,
            arrived=events.arrived,
            time_left_next=state.time_left,
            dist_to_goal_next=state.typical.position.distance_to(state.destination),
            v_max=self.config.typical_limits.v_max,
            weights=self.weights,
            defense=self.defense,
            d_jv_next=d_jv_next,
        )
        self.history.append(events)
        self.total_reward += breakdown.total
        if self.collect_trajectory:
            self.trajectory.extend(world.trajectory_rows(
                state, state.step_index, events.data_delivered))

        info: dict = {"events": events, "breakdown": breakdown}
        if state.terminal:
            info["record"] = world.finalize(self.history,
                                            state.initial_total_data,
                                            self.total_reward)
            if self.collect_trajectory:
                self.completed_trajectories.append(self.trajectory)
                info["trajectory"] = self.trajectory
        return self._features(), breakdown.total, state.terminal, info


class JammerTask:
    """Mobile-jammer control task against a frozen collector policy.

    The jammer's episode ends when the collector's episode ends or when
    the jammer reaches its own landing point.
    """

    def __init__(self, config: WorldConfig, uav_policy: FrozenUavPolicy,
                 weights: RewardWeights = RewardWeights(),
                 j_pad: int = 4, n_pad: int = 10) -> None:
        if config.jammer_spec.kind is not JammerKind.INTELLIGENT:
            raise ValueError("jammer training needs a mobile jammer")
        # The jammer attacks the deployed world: virtual emitters and
        # threshold boosts exist only while the collector trains.
        self.config = config
        self.spec = self.config.jammer_spec
        self.uav_policy = uav_policy
        self.weights = weights
        self.j_pad = j_pad
        self.n_pad = n_pad
        self.state: Optional[WorldState] = None
        self.obs_history: list[JammerObservation] = []
        self.history: list[StepEvents] = []
        self.total_reward = 0.0

    @property
    def action_count(self) -> int:
        return self.config.action_count

    @property
    def feature_length(self) -> int:
        return jammer_feature_length(self.spec.history_len,
                                     self.j_pad, self.n_pad)

    def _observe(self) -> None:
        assert self.state is not None
        self.obs_history.append(jammer_observe(self.state, self.spec))
        keep = self.spec.history_len + 1
        if len(self.obs_history) > keep:
            del self.obs_history[:-keep]

    def _features(self) -> np.ndarray:
        return jammer_featurize(self.obs_history, self.spec,
                                self.j_pad, self.n_pad)

    def reset(self, seed: int) -> np.ndarray:
        self.state = world.reset(self.config, seed)
        self.obs_history = []
        self.history = []
        self.total_reward = 0.0
        self.uav_policy.reset(self.state)
        self._observe()
        return self._features()

    def step(self, action: int) -> tuple[np.ndarray, float, bool, dict]:
        assert self.state is not None
        state = self.state
        js = state.jammer_state
        assert js is not None and state.jammer_destination is not None
        jammer_action = state.jammer_actions()[action]
        uav_action = self.uav_policy.act(state)

        d_jv_prev = js.pose.position.distance_to(state.typical.position)
        old_moving = [state.typical] + [a.pose for a in state.others]
        old_jammer = js.pose.position

        state, events = world.step(state, uav_action, jammer_action)

        new_moving = [state.typical] + [a.pose for a in state.others]
        moves = _moves_at_altitude(old_moving, new_moving, js.pose.altitude)
        min_gap = world.min_traffic_gap(old_jammer, js.pose.position,
                                        js.pose.radius, moves) if moves else None

        self.uav_policy.observe(state)
        self._observe()

        picked = state.link.scheduled_node
        typical_sinr = state.link.sinr[picked] if picked is not None else None
        d_jv_next = js.pose.position.distance_to(state.typical.position)

        breakdown = jammer_reward(
            typical_sinr_next=typical_sinr,
            d_jv_prev=d_jv_prev,
            d_jv_next=d_jv_next,
            min_traffic_gap=min_gap,
            no_fly=events.jammer_blocked,
            arrived=events.jammer_arrived,
            time_left_next=js.time_left,
            dist_to_goal_next=js.pose.position.distance_to(state.jammer_destination),
            weights=self.weights,
            spec=self.spec,
        )
        self.history.append(events)
        self.total_reward += breakdown.total
        terminal = bool(state.terminal or events.jammer_arrived)

        info: dict = {"events": events, "breakdown": breakdown}
        if state.terminal:
            info["record"] = world.finalize(self.history,
                                            state.initial_total_data,
                                            self.total_reward)
        return self._features(), breakdown.total, terminal, info
