"""Task adapters: collector task, jammer task, and the frozen
controllers that bridge trained networks back into the world."""

import math

import numpy as np
import pytest

from uavjam import world
from uavjam.agent import (
    DefenseConfig,
    DefenseMode,
    RewardWeights,
    uav_feature_length,
)
from uavjam.jammers import JammerKind, JammerSpec, jammer_feature_length
from uavjam.learner.net import QNetwork
from uavjam.learner.policy import greedy_action
from uavjam.motion import Arena, KinematicLimits, Rect, Vec2
from uavjam.tasks import (
    FrozenUavPolicy,
    JammerDriver,
    JammerTask,
    UavTask,
    _jammer_sighting,
)
from uavjam.world import TRAJECTORY_COLUMNS, WorldConfig


ARENA = Arena(x_range=(-20.0, 20.0), y_range=(-20.0, 20.0))

MOBILE_SPEC = JammerSpec(
    kind=JammerKind.INTELLIGENT,
    altitude=60.0,
    tx_power=1e-3 / 3.0,
    limits=KinematicLimits(1.5, math.pi / 3),
    deadline=40.0,
    history_len=2,
)


def make_config(jammer=JammerSpec(), **overrides):
    base = dict(
        arena=ARENA,
        node_count_range=(2, 2),
        node_tx_power=2e-3,
        initial_data=8.0,
        other_uav_count=0,
        mission_deadline=40.0,
        jammer_spec=jammer,
        departure_area=Rect(-16.0, -12.0, -12.0, 12.0),
        landing_area=Rect(12.0, 16.0, -12.0, 12.0),
    )
    base.update(overrides)
    return WorldConfig(**base)


def make_net(input_dim, action_count=22, seed=0):
    return QNetwork(input_dim, action_count, hidden=(8, 8),
                    rng=np.random.default_rng(seed))


def run_episode(task, seed, policy=lambda f: 0, max_steps=200):
    features = task.reset(seed)
    rewards = []
    info = {}
    for _ in range(max_steps):
        features, reward, done, info = task.step(policy(features))
        rewards.append(reward)
        assert np.all(np.isfinite(features))
        if done:
            return rewards, info
    raise AssertionError("episode did not terminate")


class TestUavTask:
    def test_shapes_and_action_count(self):
        task = UavTask(make_config())
        features = task.reset(7)
        assert features.shape == (uav_feature_length(DefenseConfig(), 4, 10),)
        assert task.feature_length == features.shape[0]
        assert task.action_count == 22

    def test_episode_terminates_and_reports_record(self):
        task = UavTask(make_config())
        rewards, info = run_episode(task, seed=3, policy=lambda f: 21)
        # hovering forever: the deadline fires after deadline/dt steps
        assert len(rewards) == 40
        record = info["record"]
        assert not record.success
        assert record.total_reward == pytest.approx(sum(rewards))
        assert task.total_reward == pytest.approx(sum(rewards))

    def test_step_reward_matches_breakdown(self):
        task = UavTask(make_config())
        task.reset(5)
        _, reward, _, info = task.step(0)
        assert reward == pytest.approx(info["breakdown"].total)

    def test_determinism_for_matched_seed_and_actions(self):
        actions = [0, 7, 14, 21, 3, 10, 17, 1, 8, 15]
        outs = []
        for _ in range(2):
            task = UavTask(make_config())
            feats = [task.reset(11)]
            rewards = []
            for a in actions:
                f, r, done, _ = task.step(a)
                feats.append(f)
                rewards.append(r)
                if done:
                    break
            outs.append((np.concatenate(feats), np.array(rewards)))
        np.testing.assert_array_equal(outs[0][0], outs[1][0])
        np.testing.assert_array_equal(outs[0][1], outs[1][1])

    def test_trajectory_capture(self):
        task = UavTask(make_config(), collect_trajectory=True)
        task.reset(9)
        # reset captures one row per actor at step 0
        assert task.trajectory
        assert all(row["step"] == 0 for row in task.trajectory)
        rewards, info = run_episode(task, seed=9, policy=lambda f: 2)
        trajectory = info["trajectory"]
        assert trajectory is task.trajectory
        assert task.completed_trajectories[-1] is trajectory
        assert set(trajectory[0].keys()) == set(TRAJECTORY_COLUMNS)
        typical_steps = [row["step"] for row in trajectory
                         if row["actor"] == "typical"]
        assert typical_steps == sorted(typical_steps)
        assert typical_steps[0] == 0

    def test_no_trajectory_by_default(self):
        task = UavTask(make_config())
        _, info = run_episode(task, seed=9, policy=lambda f: 2)
        assert "trajectory" not in info
        assert task.completed_trajectories == []


class TestUavTaskDefenses:
    def test_virtual_jammer_exists_only_in_training_world(self):
        config = make_config()
        defense = DefenseConfig(DefenseMode.VIRTUAL_JAMMER,
                                virtual_position=Vec2(0.0, 0.0),
                                virtual_power=1e-3 / 3.0)
        task = UavTask(config, defense=defense)
        assert config.extra_jammers == ()
        assert len(task.config.extra_jammers) == 1
        virtual = task.config.extra_jammers[0]
        assert virtual.kind is JammerKind.CONTINUOUS
        assert virtual.tx_power == pytest.approx(1e-3 / 3.0)
        # feature layout is unchanged, so the net transfers to deployment
        assert task.feature_length == UavTask(config).feature_length

    def test_threshold_boost_applies_to_training_radio(self):
        config = make_config()
        defense = DefenseConfig(DefenseMode.HIGHER_THRESHOLD,
                                threshold_boost=0.4)
        task = UavTask(config, defense=defense)
        assert task.config.radio.sinr_threshold == pytest.approx(
            config.radio.sinr_threshold + 0.4)
        assert task.feature_length == UavTask(config).feature_length

    def test_jamming_aware_features_append_track_block(self):
        defense = DefenseConfig(DefenseMode.INTELLIGENT, jammer_history_len=3)
        config = make_config(jammer=MOBILE_SPEC)
        jammer_net = make_net(
            jammer_feature_length(MOBILE_SPEC.history_len, 4, 10))
        task = UavTask(config, defense=defense, jammer_net=jammer_net)
        plain = uav_feature_length(DefenseConfig(), 4, 10)
        assert task.feature_length == plain + 2 * (3 + 1)
        features = task.reset(4)
        assert features.shape == (task.feature_length,)
        f, _, done, _ = task.step(0)
        assert f.shape == (task.feature_length,)
        assert not done

    def test_full_observation_track_matches_true_jammer(self):
        defense = DefenseConfig(DefenseMode.INTELLIGENT,
                                jammer_history_len=2,
                                use_velocity_filter=False)
        config = make_config(jammer=MOBILE_SPEC)
        jammer_net = make_net(
            jammer_feature_length(MOBILE_SPEC.history_len, 4, 10))
        task = UavTask(config, defense=defense, jammer_net=jammer_net)
        task.reset(4)
        for _ in range(5):
            _, _, done, _ = task.step(21)
            if done:
                break
            belief = task.tracker.track(1)[-1]
            true = world.jammer_position(task.state)
            assert belief.distance_to(true) == pytest.approx(0.0, abs=1e-12)


class TestJammerSighting:
    def test_no_jammer_yields_none(self):
        state = world.reset(make_config(), seed=1)
        assert _jammer_sighting(state, DefenseConfig(DefenseMode.INTELLIGENT)) is None

    def test_full_observation_reports_fixed_position(self):
        spec = JammerSpec(kind=JammerKind.CONTINUOUS,
                          position=Vec2(19.0, 19.0), tx_power=1e-4)
        state = world.reset(make_config(jammer=spec), seed=1)
        defense = DefenseConfig(DefenseMode.INTELLIGENT,
                                use_velocity_filter=False)
        assert _jammer_sighting(state, defense) == Vec2(19.0, 19.0)

    def test_sensing_limited_hides_distant_jammer(self):
        spec = JammerSpec(kind=JammerKind.CONTINUOUS,
                          position=Vec2(19.0, 19.0), tx_power=1e-4)
        # collector departs on the far left: distance to (19, 19) > 15 m
        state = world.reset(make_config(jammer=spec), seed=1)
        defense = DefenseConfig(DefenseMode.INTELLIGENT,
                                use_velocity_filter=True)
        assert state.typical.position.distance_to(Vec2(19.0, 19.0)) > 15.0
        assert _jammer_sighting(state, defense) is None

    def test_sensing_limited_sees_nearby_jammer(self):
        spec = JammerSpec(kind=JammerKind.CONTINUOUS,
                          position=Vec2(-14.0, 0.0), tx_power=1e-4)
        config = make_config(jammer=spec,
                             departure_area=Rect(-16.0, -12.0, -1.0, 1.0))
        state = world.reset(config, seed=1)
        defense = DefenseConfig(DefenseMode.INTELLIGENT,
                                use_velocity_filter=True)
        assert state.typical.position.distance_to(Vec2(-14.0, 0.0)) <= 15.0
        assert _jammer_sighting(state, defense) == Vec2(-14.0, 0.0)


class TestJammerDriver:
    def test_rejects_static_spec(self):
        net = make_net(jammer_feature_length(2, 4, 10))
        fixed = JammerSpec(kind=JammerKind.CONTINUOUS,
                           position=Vec2(0.0, 0.0), tx_power=1e-4)
        with pytest.raises(ValueError, match="mobile"):
            JammerDriver(net, fixed)

    def test_rejects_mismatched_network(self):
        net = make_net(jammer_feature_length(2, 4, 10) + 1)
        with pytest.raises(ValueError, match="features"):
            JammerDriver(net, MOBILE_SPEC)

    def test_history_window_is_bounded(self):
        net = make_net(jammer_feature_length(MOBILE_SPEC.history_len, 4, 10))
        driver = JammerDriver(net, MOBILE_SPEC)
        state = world.reset(make_config(jammer=MOBILE_SPEC), seed=2)
        for _ in range(7):
            driver.observe(state)
        assert len(driver.history) == MOBILE_SPEC.history_len + 1
        driver.reset()
        assert driver.history == []

    def test_act_is_greedy_over_jammer_actions(self):
        net = make_net(jammer_feature_length(MOBILE_SPEC.history_len, 4, 10))
        driver = JammerDriver(net, MOBILE_SPEC)
        state = world.reset(make_config(jammer=MOBILE_SPEC), seed=2)
        driver.observe(state)
        action = driver.act(state)
        options = state.jammer_actions()
        assert action == options[action.index]
        from uavjam.jammers import jammer_featurize

        expected = greedy_action(net.q_values(
            jammer_featurize(driver.history, MOBILE_SPEC, 4, 10)))
        assert action.index == expected


class TestFrozenUavPolicy:
    def test_rejects_mismatched_network(self):
        net = make_net(uav_feature_length(DefenseConfig(), 4, 10))
        defense = DefenseConfig(DefenseMode.INTELLIGENT, jammer_history_len=4)
        with pytest.raises(ValueError, match="defense configuration"):
            FrozenUavPolicy(net, defense)

    def test_act_matches_greedy_featurization(self):
        from uavjam.agent import uav_featurize, uav_observe

        net = make_net(uav_feature_length(DefenseConfig(), 4, 10))
        policy = FrozenUavPolicy(net, DefenseConfig())
        state = world.reset(make_config(), seed=6)
        policy.reset(state)
        action = policy.act(state)
        features = uav_featurize(uav_observe(state, None), DefenseConfig(), 4, 10)
        assert action.index == greedy_action(net.q_values(features))

    def test_tracker_only_in_jamming_aware_mode(self):
        net = make_net(uav_feature_length(DefenseConfig(), 4, 10))
        policy = FrozenUavPolicy(net, DefenseConfig())
        state = world.reset(make_config(), seed=6)
        policy.reset(state)
        assert policy.tracker is None

        defense = DefenseConfig(DefenseMode.INTELLIGENT, jammer_history_len=2)
        net2 = make_net(uav_feature_length(defense, 4, 10))
        policy2 = FrozenUavPolicy(net2, defense)
        state2 = world.reset(make_config(jammer=MOBILE_SPEC), seed=6)
        policy2.reset(state2)
        assert policy2.tracker is not None


class TestJammerTask:
    def make_task(self, defense=DefenseConfig(), config=None):
        config = config or make_config(jammer=MOBILE_SPEC)
        net = make_net(uav_feature_length(defense, 4, 10))
        policy = FrozenUavPolicy(net, defense)
        return JammerTask(config, policy)

    def test_requires_mobile_jammer(self):
        net = make_net(uav_feature_length(DefenseConfig(), 4, 10))
        policy = FrozenUavPolicy(net, DefenseConfig())
        with pytest.raises(ValueError, match="mobile"):
            JammerTask(make_config(), policy)

    def test_attacks_the_deployed_world_not_the_training_world(self):
        # a collector trained with a virtual emitter is attacked in the
        # plain world: the virtual emitter is a training-only artifact
        config = make_config(jammer=MOBILE_SPEC)
        defense = DefenseConfig(DefenseMode.VIRTUAL_JAMMER,
                                virtual_position=Vec2(0.0, 0.0),
                                virtual_power=1e-3 / 3.0)
        net = make_net(uav_feature_length(defense, 4, 10))
        policy = FrozenUavPolicy(net, defense)
        task = JammerTask(config, policy)
        assert task.config is config
        assert task.config.extra_jammers == ()

    def test_shapes_and_action_count(self):
        task = self.make_task()
        features = task.reset(8)
        expected = jammer_feature_length(MOBILE_SPEC.history_len, 4, 10)
        assert features.shape == (expected,)
        assert task.feature_length == expected
        assert task.action_count == 22

    def test_episode_ends_with_collector_and_reports_record(self):
        task = self.make_task()
        rewards, info = run_episode(task, seed=8, policy=lambda f: 21,
                                    max_steps=60)
        assert "record" in info
        assert task.total_reward == pytest.approx(sum(rewards))

    def test_jammer_arrival_ends_episode_without_record(self):
        # aim the jammer at its destination each step; once it lands the
        # jammer's episode is over even though the collector flies on
        task = self.make_task()
        task.reset(8)
        info = {}
        for _ in range(60):
            state = task.state
            goal = state.jammer_destination
            pos = state.jammer_state.pose.position
            options = state.jammer_actions()
            best = min(
                options,
                key=lambda a: (pos + a.velocity * state.config.dt).distance_to(goal))
            _, _, done, info = task.step(best.index)
            if done:
                break
        assert done
        if info["events"].jammer_arrived and not task.state.terminal:
            assert "record" not in info

    def test_determinism_for_matched_seed_and_actions(self):
        actions = [0, 5, 10, 15, 20, 21, 2, 7]
        outs = []
        for _ in range(2):
            task = self.make_task()
            feats = [task.reset(12)]
            rewards = []
            for a in actions:
                f, r, done, _ = task.step(a)
                feats.append(f)
                rewards.append(r)
                if done:
                    break
            outs.append((np.concatenate(feats), np.array(rewards)))
        np.testing.assert_array_equal(outs[0][0], outs[1][0])
        np.testing.assert_array_equal(outs[0][1], outs[1][1])

    def test_scenario_matches_collector_task_for_same_seed(self):
        # node/start draws come from the scenario substream, so the same
        # seed lays out the same world for both adapters
        uav_task = UavTask(make_config(jammer=MOBILE_SPEC),
                           jammer_net=make_net(
                               jammer_feature_length(MOBILE_SPEC.history_len,
                                                     4, 10)))
        jam_task = self.make_task()
        uav_task.reset(13)
        jam_task.reset(13)
        nodes_a = [(n.position.x, n.position.y) for n in uav_task.state.nodes]
        nodes_b = [(n.position.x, n.position.y) for n in jam_task.state.nodes]
        assert nodes_a == nodes_b
        assert uav_task.state.typical.position == jam_task.state.typical.position
