"""Shared rollout harness for collision-avoidance tests."""

from uavjam.motion import Pose, Vec2, apply_velocity, disc_collision
from uavjam.orca import OrcaAgent, orca_step


def orca_rollout(agents: list[OrcaAgent], dt: float, steps: int):
    """Advance all agents simultaneously; returns (min pairwise distance
    seen, collision flag from inclusive disc check, final agents)."""
    min_dist = float("inf")
    collided = False
    for _ in range(steps):
        velocities = []
        for k, agent in enumerate(agents):
            others = [a.pose for i, a in enumerate(agents) if i != k]
            velocities.append(orca_step(agent, others, dt))
        for agent, vel in zip(agents, velocities):
            agent.pose = apply_velocity(agent.pose, vel, dt)
        for i in range(len(agents)):
            for j in range(i + 1, len(agents)):
                a, b = agents[i].pose, agents[j].pose
                min_dist = min(min_dist, a.position.distance_to(b.position))
                if disc_collision(a, b):
                    collided = True
    return min_dist, collided, agents


def make_agent(x, y, gx, gy, v_max=1.0, radius=0.5, heading=0.0,
               time_horizon=5.0, neighbor_range=15.0) -> OrcaAgent:
    pose = Pose(Vec2(x, y), 50.0, Vec2(0.0, 0.0), heading, radius)
    return OrcaAgent(pose, Vec2(gx, gy), v_max, time_horizon, neighbor_range)
