"""Reciprocal collision avoidance for the non-adversarial traffic UAVs.

Each agent independently picks the velocity closest to its preferred
velocity (straight toward its goal) subject to one half-plane constraint
per neighbor, derived from the truncated velocity obstacle with both
agents taking half the avoidance responsibility.  When the constraints
are infeasible the agent falls back to the least-penetrating velocity.

Internals work on raw floats; the rollout tests call this tens of
thousands of times per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .motion import Pose, Vec2

_EPS = 1e-10


@dataclass
class OrcaAgent:
    pose: Pose
    goal: Vec2
    v_max: float
    time_horizon: float = 5.0
    neighbor_range: float = 15.0
    # constraints see slightly inflated discs: grazing contact would
    # otherwise sit exactly on the inclusive collision boundary
    safety_margin: float = 1.05

    def __post_init__(self):
        if not self.v_max > 0.0:
            raise ValueError("v_max must be > 0")
        if not self.time_horizon > 0.0:
            raise ValueError("time_horizon must be > 0")
        if not self.safety_margin >= 1.0:
            raise ValueError("safety_margin must be >= 1")


@dataclass
class _Line:
    px: float
    py: float
    dx: float
    dy: float


def _lp1(lines: list[_Line], line_no: int, radius: float,
         opt_x: float, opt_y: float, direction_opt: bool) -> tuple[bool, float, float]:
    """Optimize along lines[line_no] subject to lines[:line_no] and the
    speed disk.  Returns (feasible, vx, vy)."""
    ln = lines[line_no]
    dot = ln.px * ln.dx + ln.py * ln.dy
    disc = dot * dot + radius * radius - (ln.px * ln.px + ln.py * ln.py)
    if disc < 0.0:
        return False, 0.0, 0.0
    sqrt_disc = math.sqrt(disc)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc

    for i in range(line_no):
        li = lines[i]
        denom = ln.dx * li.dy - ln.dy * li.dx
        numer = li.dx * (ln.py - li.py) - li.dy * (ln.px - li.px)
        if abs(denom) <= _EPS:
            if numer < 0.0:
                return False, 0.0, 0.0
            continue
        t = numer / denom
        if denom >= 0.0:
            if t < t_right:
                t_right = t
        else:
            if t > t_left:
                t_left = t
        if t_left > t_right:
            return False, 0.0, 0.0

    if direction_opt:
        if opt_x * ln.dx + opt_y * ln.dy > 0.0:
            t = t_right
        else:
            t = t_left
    else:
        t = ln.dx * (opt_x - ln.px) + ln.dy * (opt_y - ln.py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right
    return True, ln.px + t * ln.dx, ln.py + t * ln.dy


def _lp2(lines: list[_Line], radius: float, opt_x: float, opt_y: float,
         direction_opt: bool) -> tuple[int, float, float]:
    """Feasibility pass over all lines in order.  Returns the index of
    the first irreparable line (== len(lines) on success) and the best
    velocity found."""
    if direction_opt:
        # opt is a unit direction; start at the disk edge
        vx, vy = opt_x * radius, opt_y * radius
    elif opt_x * opt_x + opt_y * opt_y > radius * radius:
        norm = math.sqrt(opt_x * opt_x + opt_y * opt_y)
        vx, vy = opt_x / norm * radius, opt_y / norm * radius
    else:
        vx, vy = opt_x, opt_y

    for i, ln in enumerate(lines):
        if ln.dx * (ln.py - vy) - ln.dy * (ln.px - vx) > 0.0:
            ok, nvx, nvy = _lp1(lines, i, radius, opt_x, opt_y, direction_opt)
            if not ok:
                return i, vx, vy
            vx, vy = nvx, nvy
    return len(lines), vx, vy


def _lp3(lines: list[_Line], begin_line: int, radius: float,
         vx: float, vy: float) -> tuple[float, float]:
    """Least-penetration fallback when _lp2 failed at begin_line."""
    distance = 0.0
    for i in range(begin_line, len(lines)):
        li = lines[i]
        if li.dx * (li.py - vy) - li.dy * (li.px - vx) > distance:
            proj: list[_Line] = []
            for j in range(i):
                lj = lines[j]
                denom = li.dx * lj.dy - li.dy * lj.dx
                if abs(denom) <= _EPS:
                    if li.dx * lj.dx + li.dy * lj.dy > 0.0:
                        continue
                    px = 0.5 * (li.px + lj.px)
                    py = 0.5 * (li.py + lj.py)
                else:
                    t = (lj.dx * (li.py - lj.py) - lj.dy * (li.px - lj.px)) / denom
                    px = li.px + t * li.dx
                    py = li.py + t * li.dy
                ddx = lj.dx - li.dx
                ddy = lj.dy - li.dy
                norm = math.sqrt(ddx * ddx + ddy * ddy)
                proj.append(_Line(px, py, ddx / norm, ddy / norm))
            fail, nvx, nvy = _lp2(proj, radius, -li.dy, li.dx, True)
            if fail >= len(proj):
                vx, vy = nvx, nvy
            distance = li.dx * (li.py - vy) - li.dy * (li.px - vx)
    return vx, vy


def preferred_velocity(agent: OrcaAgent, dt: float) -> Vec2:
    """Straight toward the goal, capped so one step never overshoots."""
    to_goal = agent.goal - agent.pose.position
    dist = to_goal.norm()
    if dist < _EPS:
        return Vec2(0.0, 0.0)
    speed = min(agent.v_max, dist / dt)
    return to_goal * (speed / dist)


def orca_step(agent: OrcaAgent, neighbors: list[Pose], dt: float) -> Vec2:
    """New velocity for this step given the sensed same-altitude traffic."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    pref = preferred_velocity(agent, dt)

    near = [nb for nb in neighbors
            if agent.pose.position.distance_to(nb.position) <= agent.neighbor_range]
    near.sort(key=lambda nb: (agent.pose.position.distance_to(nb.position),
                              nb.position.x, nb.position.y))

    # exact head-on tie: nudge the preference clockwise so the mirrored
    # agents split in opposite directions
    px, py = agent.pose.position.x, agent.pose.position.y
    vx0, vy0 = agent.pose.velocity.x, agent.pose.velocity.y
    for nb in near:
        rx, ry = nb.position.x - px, nb.position.y - py
        if abs(rx * pref.y - ry * pref.x) < 1e-9 and rx * pref.x + ry * pref.y > 0.0:
            c, s = math.cos(-1e-3), math.sin(-1e-3)
            pref = Vec2(c * pref.x - s * pref.y, s * pref.x + c * pref.y)
            break

    inv_horizon = 1.0 / agent.time_horizon
    inv_dt = 1.0 / dt
    lines: list[_Line] = []
    for nb in near:
        rx, ry = nb.position.x - px, nb.position.y - py
        rvx, rvy = vx0 - nb.velocity.x, vy0 - nb.velocity.y
        dist_sq = rx * rx + ry * ry
        rr = (agent.pose.radius + nb.radius) * agent.safety_margin
        if rr * rr >= dist_sq and agent.pose.radius + nb.radius < math.sqrt(dist_sq):
            # inside the inflated margin but not actually touching:
            # shrink toward the true radius so the constraint stays a cone
            rr = 0.5 * (agent.pose.radius + nb.radius + math.sqrt(dist_sq))
        rr_sq = rr * rr

        if dist_sq > rr_sq:
            wx = rvx - rx * inv_horizon
            wy = rvy - ry * inv_horizon
            w_len_sq = wx * wx + wy * wy
            dot1 = wx * rx + wy * ry
            if dot1 < 0.0 and dot1 * dot1 > rr_sq * w_len_sq:
                # project on the cutoff circle
                w_len = math.sqrt(w_len_sq)
                uwx, uwy = wx / w_len, wy / w_len
                dx, dy = uwy, -uwx
                scale = rr * inv_horizon - w_len
                ux, uy = scale * uwx, scale * uwy
            else:
                # project on a cone leg
                leg = math.sqrt(dist_sq - rr_sq)
                if rx * wy - ry * wx > 0.0:
                    dx = (rx * leg - ry * rr) / dist_sq
                    dy = (rx * rr + ry * leg) / dist_sq
                else:
                    dx = -(rx * leg + ry * rr) / dist_sq
                    dy = (rx * rr - ry * leg) / dist_sq
                dot2 = rvx * dx + rvy * dy
                ux, uy = dot2 * dx - rvx, dot2 * dy - rvy
        else:
            # already overlapping: push apart within one step
            wx = rvx - rx * inv_dt
            wy = rvy - ry * inv_dt
            w_len = math.sqrt(wx * wx + wy * wy)
            if w_len < _EPS:
                uwx, uwy = (-rx, -ry) if dist_sq > 0.0 else (1.0, 0.0)
                n = math.sqrt(uwx * uwx + uwy * uwy)
                uwx, uwy = uwx / n, uwy / n
                w_len = 0.0
            else:
                uwx, uwy = wx / w_len, wy / w_len
            dx, dy = uwy, -uwx
            scale = rr * inv_dt - w_len
            ux, uy = scale * uwx, scale * uwy

        lines.append(_Line(vx0 + 0.5 * ux, vy0 + 0.5 * uy, dx, dy))

    fail, vx, vy = _lp2(lines, agent.v_max, pref.x, pref.y, False)
    if fail < len(lines):
        vx, vy = _lp3(lines, fail, agent.v_max, vx, vy)
    return Vec2(vx, vy)
