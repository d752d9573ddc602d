"""Planar geometry, kinematics, and the discretized action space.

Every aircraft is a disc flying at a fixed altitude.  Once per step it
commits to a velocity picked from a finite set sampled under its speed
and turn-rate limits; motion is a first-order hold over the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def heading(self) -> float:
        return math.atan2(self.y, self.x)

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class Pose:
    """Disc aircraft snapshot.

    heading tracks atan2 of the velocity whenever the aircraft moves;
    while hovering it keeps the last moving heading.
    """

    position: Vec2
    altitude: float
    velocity: Vec2
    heading: float
    radius: float

    def __post_init__(self):
        if not (self.position.is_finite() and self.velocity.is_finite()):
            raise ValueError("pose has non-finite components")
        if not self.radius > 0.0:
            raise ValueError(f"pose radius must be > 0, got {self.radius}")

    @property
    def speed(self) -> float:
        return self.velocity.norm()


@dataclass(frozen=True)
class KinematicLimits:
    v_max: float
    max_turn_rate: float  # rad/s

    def __post_init__(self):
        if not self.v_max > 0.0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if not self.max_turn_rate > 0.0:
            raise ValueError(f"max_turn_rate must be > 0, got {self.max_turn_rate}")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, closed on its boundary."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("degenerate rectangle")

    def contains(self, p: Vec2) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max


@dataclass(frozen=True)
class Arena:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    no_fly_zones: tuple[Rect, ...] = field(default_factory=tuple)
    sensing_radius: float = 15.0

    def __post_init__(self):
        if self.x_range[0] >= self.x_range[1] or self.y_range[0] >= self.y_range[1]:
            raise ValueError("arena ranges must be non-degenerate")
        if not self.sensing_radius > 0.0:
            raise ValueError("sensing_radius must be > 0")
        for zone in self.no_fly_zones:
            if (zone.x_min < self.x_range[0] or zone.x_max > self.x_range[1]
                    or zone.y_min < self.y_range[0] or zone.y_max > self.y_range[1]):
                raise ValueError(f"no-fly zone {zone} extends outside the arena")

    def contains(self, p: Vec2) -> bool:
        return (self.x_range[0] <= p.x <= self.x_range[1]
                and self.y_range[0] <= p.y <= self.y_range[1])


@dataclass(frozen=True)
class VelocityAction:
    index: int
    velocity: Vec2


def sample_velocity_set(limits: KinematicLimits, current_heading: float, dt: float,
                        k_speeds: int = 3, m_headings: int = 7) -> list[VelocityAction]:
    """Discretize the permissible velocities for one step.

    Returns k_speeds * m_headings + 1 actions: speeds {v_max*k/K, k=1..K}
    crossed with m_headings headings evenly spanning the reachable cone
    [heading - dt*turn_rate, heading + dt*turn_rate], plus a hover action
    last.  Ordering is speed-major, heading ascending, so an action index
    keeps its meaning (relative to the current heading) across steps.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if k_speeds < 1:
        raise ValueError("need at least one speed level")
    if m_headings < 1:
        raise ValueError("need at least one heading")

    swing = dt * limits.max_turn_rate
    if m_headings == 1:
        offsets = [0.0]
    else:
        step = 2.0 * swing / (m_headings - 1)
        offsets = [-swing + i * step for i in range(m_headings)]

    actions: list[VelocityAction] = []
    for k in range(1, k_speeds + 1):
        speed = limits.v_max * k / k_speeds
        for off in offsets:
            h = wrap_angle(current_heading + off)
            actions.append(VelocityAction(len(actions), Vec2(speed * math.cos(h), speed * math.sin(h))))
    actions.append(VelocityAction(len(actions), ZERO))
    return actions


def integrate_motion(pose: Pose, action: VelocityAction, dt: float) -> Pose:
    """First-order hold: constant velocity over the step."""
    v = action.velocity
    if v.x == 0.0 and v.y == 0.0:
        return Pose(pose.position, pose.altitude, ZERO, pose.heading, pose.radius)
    return Pose(pose.position + v * dt, pose.altitude, v, v.heading(), pose.radius)


def apply_velocity(pose: Pose, velocity: Vec2, dt: float) -> Pose:
    """Like integrate_motion for a velocity not drawn from a sampled set."""
    return integrate_motion(pose, VelocityAction(-1, velocity), dt)


def disc_collision(a: Pose, b: Pose) -> bool:
    """Touching discs count as a collision (conservative boundary)."""
    return a.position.distance_to(b.position) <= a.radius + b.radius


def violates_no_fly(position: Vec2, arena: Arena) -> bool:
    """True if outside the arena or inside (or on the edge of) any zone."""
    if not arena.contains(position):
        return True
    return any(zone.contains(position) for zone in arena.no_fly_zones)


def within_sensing(observer: Pose, target: Pose, arena: Arena) -> bool:
    return observer.position.distance_to(target.position) <= arena.sensing_radius


def segment_min_distance(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> float:
    """Min distance between two aircraft moving p0->p1 and q0->q1 over one
    step, sampled at start, midpoint, and end (cheap swept check)."""
    best = math.inf
    for t in (0.0, 0.5, 1.0):
        p = Vec2(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y))
        q = Vec2(q0.x + t * (q1.x - q0.x), q0.y + t * (q1.y - q0.y))
        best = min(best, p.distance_to(q))
    return best
