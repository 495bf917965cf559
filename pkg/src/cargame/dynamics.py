"""Differential-drive planar kinematics with chassis layout effects.

Wheel speeds combine into a body twist (forward speed + yaw rate); an
unlocked front caster injects yaw noise, amplified by uneven fore/aft
weight; poses integrate along exact circular arcs so results do not depend
on the step size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

# Below this yaw rate the arc integrator switches to its straight-line
# limit; the two branches agree to ~1e-9 m at the crossover.
_OMEGA_STRAIGHT_EPS = 1e-9


@dataclass(frozen=True)
class TwoWheelCaster:
    """Two driven rear wheels plus a front caster; locked means the caster
    is constrained to roll fore/aft only."""

    locked: bool = False


@dataclass(frozen=True)
class FourWheel:
    """Skid-steer: two driven wheels per side, each side in lockstep."""


Layout = TwoWheelCaster | FourWheel


@dataclass(frozen=True)
class ChassisConfig:
    wheel_radius: float = 0.033  # m
    track_width: float = 0.14  # m
    body_radius: float = 0.09  # m, collision circle
    layout: Layout = field(default_factory=TwoWheelCaster)
    weight_front_fraction: float = 0.5
    caster_sigma: float = 0.15  # rad/s yaw-noise scale

    def __post_init__(self) -> None:
        if min(self.wheel_radius, self.track_width, self.body_radius) <= 0:
            raise ValueError("chassis lengths must be positive")
        if not 0.0 <= self.weight_front_fraction <= 1.0:
            raise ValueError("weight_front_fraction must be in [0, 1]")


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0  # rad, CCW from +x, normalized to (-pi, pi]
    t: float = 0.0  # s


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]; exact no-op for in-range values."""
    if -math.pi < theta <= math.pi:
        return theta
    theta = math.fmod(theta + math.pi, 2.0 * math.pi)
    if theta <= 0.0:
        theta += 2.0 * math.pi
    return theta - math.pi


def body_twist(
    omega_left: float, omega_right: float, c: ChassisConfig
) -> tuple[float, float]:
    """Wheel speeds (rad/s) to (forward m/s, yaw rad/s).

    A faster right wheel gives a positive (CCW) yaw rate, i.e. a left turn.
    """
    v = c.wheel_radius * (omega_left + omega_right) / 2.0
    omega_body = c.wheel_radius * (omega_right - omega_left) / c.track_width
    return v, omega_body


def caster_disturbance(c: ChassisConfig, rng: random.Random) -> float:
    """Yaw-rate disturbance (rad/s) from a free-swiveling caster.

    Zero for a locked caster or a four-wheel layout; otherwise Gaussian,
    with fore/aft weight imbalance amplifying the spread.
    """
    if isinstance(c.layout, FourWheel) or c.layout.locked:
        return 0.0
    scale = c.caster_sigma * (1.0 + 2.0 * abs(c.weight_front_fraction - 0.5))
    return rng.gauss(0.0, scale)


def pose_step(p: Pose, v: float, omega: float, dt: float) -> Pose:
    """Integrate the pose along an exact constant-twist arc for dt seconds."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if abs(omega) < _OMEGA_STRAIGHT_EPS:
        x = p.x + v * math.cos(p.theta) * dt
        y = p.y + v * math.sin(p.theta) * dt
    else:
        r = v / omega
        x = p.x + r * (math.sin(p.theta + omega * dt) - math.sin(p.theta))
        y = p.y - r * (math.cos(p.theta + omega * dt) - math.cos(p.theta))
    theta = normalize_angle(p.theta + omega * dt)
    return Pose(x, y, theta, p.t + dt)
