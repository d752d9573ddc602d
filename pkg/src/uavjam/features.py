"""Agent-centric feature frames.

Both learning agents see the world in a frame translated to their own
position and rotated so that the direction toward their destination is
the +x axis.  Features built this way are invariant under global rigid
translations and under rotations about the agent, which is what the
property tests assert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .motion import Vec2, wrap_angle


@dataclass(frozen=True)
class Frame:
    origin: Vec2
    cos: float
    sin: float

    @classmethod
    def toward(cls, origin: Vec2, target: Vec2) -> "Frame":
        """Frame at `origin` with +x pointing at `target`; identity
        rotation when the two coincide."""
        d = target - origin
        n = d.norm()
        if n < 1e-12:
            return cls(origin, 1.0, 0.0)
        return cls(origin, d.x / n, d.y / n)

    def to_local(self, p: Vec2) -> Vec2:
        """Project a world point into this frame."""
        dx = p.x - self.origin.x
        dy = p.y - self.origin.y
        return Vec2(self.cos * dx + self.sin * dy,
                    -self.sin * dx + self.cos * dy)

    def rotate(self, v: Vec2) -> Vec2:
        """Rotate a world vector (velocity) into this frame."""
        return Vec2(self.cos * v.x + self.sin * v.y,
                    -self.sin * v.x + self.cos * v.y)

    def local_heading(self, heading: float) -> float:
        return wrap_angle(heading - math.atan2(self.sin, self.cos))


def polar(p_local: Vec2) -> tuple[float, float]:
    """(distance, bearing) of a frame-local point."""
    return p_local.norm(), math.atan2(p_local.y, p_local.x)
