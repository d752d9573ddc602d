"""Reciprocal avoidance: constraint-free cases and rollout safety."""

import math

import numpy as np
import pytest

from _rollouts import make_agent, orca_rollout
from uavjam.motion import Pose, Vec2
from uavjam.orca import OrcaAgent, orca_step, preferred_velocity


class TestPreferredVelocity:
    def test_no_neighbors_goes_straight(self):
        agent = make_agent(0, 0, 10, 0, v_max=2.0)
        v = orca_step(agent, [], 1.0)
        assert v.distance_to(Vec2(2.0, 0.0)) < 1e-12

    def test_capped_by_remaining_distance(self):
        agent = make_agent(0, 0, 0.5, 0, v_max=2.0)
        v = orca_step(agent, [], 1.0)
        assert v.distance_to(Vec2(0.5, 0.0)) < 1e-12

    def test_at_goal_hovers(self):
        agent = make_agent(3, 3, 3, 3)
        assert orca_step(agent, [], 1.0) == Vec2(0.0, 0.0)

    def test_unconstraining_neighbor_leaves_preference(self):
        # neighbor ahead on x while the goal is on y: the velocity
        # obstacle never contains the preferred velocity
        agent = make_agent(0, 0, 0, 20, v_max=2.0)
        nb = Pose(Vec2(14.0, 0.0), 50.0, Vec2(0.0, 0.0), 0.0, 0.5)
        v = orca_step(agent, [nb], 1.0)
        assert v.distance_to(Vec2(0.0, 2.0)) < 1e-12


class TestRollouts:
    def test_head_on_pair_never_collides(self):
        a = make_agent(-10, 0, 10, 0)
        b = make_agent(10, 0, -10, 0, heading=math.pi)
        min_dist, collided, agents = orca_rollout([a, b], 0.25, 200)
        assert not collided
        assert min_dist > 1.0
        for agent in agents:
            assert agent.pose.position.distance_to(agent.goal) < 1.0

    def test_perpendicular_crossing(self):
        a = make_agent(-10, 0, 10, 0)
        b = make_agent(0, -10, 0, 10)
        min_dist, collided, _ = orca_rollout([a, b], 0.25, 200)
        assert not collided

    def test_four_agent_cross(self):
        agents = [
            make_agent(-10, 0, 10, 0),
            make_agent(10, 0, -10, 0, heading=math.pi),
            make_agent(0, -10, 0, 10, heading=math.pi / 2),
            make_agent(0, 10, 0, -10, heading=-math.pi / 2),
        ]
        min_dist, collided, agents = orca_rollout(agents, 0.25, 200)
        assert not collided
        for agent in agents:
            assert agent.pose.position.distance_to(agent.goal) < 1.5

    def test_speed_never_exceeds_limit(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            agents = [make_agent(*rng.uniform(-10, 10, 2), *rng.uniform(-10, 10, 2),
                                 v_max=float(rng.uniform(0.5, 3.0)))
                      for _ in range(3)]
            for _ in range(50):
                vels = []
                for k, agent in enumerate(agents):
                    others = [a.pose for i, a in enumerate(agents) if i != k]
                    v = orca_step(agent, others, 0.5)
                    assert v.norm() <= agent.v_max * (1 + 1e-9)
                    vels.append(v)
                from uavjam.motion import apply_velocity
                for agent, v in zip(agents, vels):
                    agent.pose = apply_velocity(agent.pose, v, 0.5)


class TestValidation:
    def test_bad_dt(self):
        agent = make_agent(0, 0, 1, 1)
        with pytest.raises(ValueError):
            orca_step(agent, [], 0.0)

    def test_bad_agent_params(self):
        pose = Pose(Vec2(0, 0), 50.0, Vec2(0, 0), 0.0, 0.5)
        with pytest.raises(ValueError):
            OrcaAgent(pose, Vec2(1, 1), v_max=0.0)
        with pytest.raises(ValueError):
            OrcaAgent(pose, Vec2(1, 1), v_max=1.0, time_horizon=0.0)

    def test_preferred_velocity_helper(self):
        agent = make_agent(0, 0, 3, 4, v_max=10.0)
        v = preferred_velocity(agent, 1.0)
        assert v.distance_to(Vec2(3.0, 4.0)) < 1e-12
