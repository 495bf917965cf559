"""Planar kinematics: body twist, caster disturbance, exact arc integration."""

import math
import random

import pytest

from cargame.dynamics import (
    ChassisConfig,
    FourWheel,
    Pose,
    TwoWheelCaster,
    body_twist,
    caster_disturbance,
    normalize_angle,
    pose_step,
)


class SigmaProbe:
    """Stands in for an rng; records the sigma passed to gauss."""

    def __init__(self):
        self.sigmas = []

    def gauss(self, mu, sigma):
        self.sigmas.append(sigma)
        return sigma  # deterministic, nonzero


class TestBodyTwist:
    def test_equal_speeds_go_straight(self):
        c = ChassisConfig()
        v, omega = body_twist(10.0, 10.0, c)
        assert v == pytest.approx(c.wheel_radius * 10.0)
        assert omega == 0.0

    def test_right_faster_turns_left(self):
        c = ChassisConfig(wheel_radius=0.033, track_width=0.14)
        v, omega = body_twist(0.0, 10.0, c)
        assert v == pytest.approx(0.165)
        assert omega == pytest.approx(0.33 / 0.14)  # ~2.357 rad/s, CCW
        assert omega > 0

    def test_negation_symmetry(self):
        c = ChassisConfig()
        v, omega = body_twist(3.0, 7.0, c)
        nv, nomega = body_twist(-3.0, -7.0, c)
        assert nv == -v and nomega == -omega


class TestCasterDisturbance:
    def test_locked_is_zero(self):
        c = ChassisConfig(layout=TwoWheelCaster(locked=True))
        assert caster_disturbance(c, random.Random(0)) == 0.0

    def test_four_wheel_is_zero(self):
        c = ChassisConfig(layout=FourWheel())
        assert caster_disturbance(c, random.Random(0)) == 0.0

    def test_imbalance_amplifies(self):
        probe = SigmaProbe()
        balanced = ChassisConfig(layout=TwoWheelCaster(), weight_front_fraction=0.5)
        skewed = ChassisConfig(layout=TwoWheelCaster(), weight_front_fraction=0.9)
        caster_disturbance(balanced, probe)
        caster_disturbance(skewed, probe)
        assert probe.sigmas[1] == pytest.approx(1.8 * probe.sigmas[0])

    def test_unlocked_draws_from_rng(self):
        c = ChassisConfig(layout=TwoWheelCaster())
        values = {caster_disturbance(c, random.Random(s)) for s in range(5)}
        assert len(values) == 5


class TestPoseStep:
    def test_straight_motion(self):
        p = pose_step(Pose(1.0, 2.0, 0.0, 0.0), 1.0, 0.0, 1.0)
        assert (p.x, p.y, p.theta, p.t) == (2.0, 2.0, 0.0, 1.0)

    def test_quarter_circle(self):
        p = pose_step(Pose(), 0.5, 1.0, math.pi / 2)
        assert p.x == pytest.approx(0.5, abs=1e-12)
        assert p.y == pytest.approx(0.5, abs=1e-12)
        assert p.theta == pytest.approx(math.pi / 2, abs=1e-12)

    def test_branch_continuity(self):
        arc = pose_step(Pose(), 1.0, 1e-12, 1.0)
        straight = pose_step(Pose(), 1.0, 0.0, 1.0)
        assert arc.x == pytest.approx(straight.x, abs=1e-9)
        assert arc.y == pytest.approx(straight.y, abs=1e-9)

    def test_half_step_composition(self):
        rng = random.Random(11)
        for _ in range(100):
            p0 = Pose(rng.uniform(-5, 5), rng.uniform(-5, 5),
                      rng.uniform(-math.pi, math.pi))
            v, omega, dt = rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(0.01, 1)
            whole = pose_step(p0, v, omega, dt)
            halves = pose_step(pose_step(p0, v, omega, dt / 2), v, omega, dt / 2)
            assert whole.x == pytest.approx(halves.x, abs=1e-12)
            assert whole.y == pytest.approx(halves.y, abs=1e-12)

    def test_matches_fine_euler(self):
        """10 s constant twist vs 1 ms forward-Euler oracle, 1e-6 m."""
        v, omega = 0.3, 0.7
        p = pose_step(Pose(), v, omega, 10.0)
        x = y = theta = 0.0
        dt = 0.001
        for _ in range(10_000):
            x += v * math.cos(theta) * dt
            y += v * math.sin(theta) * dt
            theta += omega * dt
        assert p.x == pytest.approx(x, abs=1e-3)  # Euler itself carries error
        # use midpoint-corrected Euler for the tight bound
        x = y = theta = 0.0
        for _ in range(10_000):
            x += v * math.cos(theta + omega * dt / 2) * dt
            y += v * math.sin(theta + omega * dt / 2) * dt
            theta += omega * dt
        assert p.x == pytest.approx(x, abs=1e-6)
        assert p.y == pytest.approx(y, abs=1e-6)

    def test_straightness_exact_over_long_horizon(self):
        p = Pose()
        for _ in range(10_000):
            p = pose_step(p, 0.25, 0.0, 0.01)
        assert p.y == 0.0 and p.theta == 0.0

    def test_left_turn_sign(self):
        c = ChassisConfig()
        _, omega = body_twist(2.0, 5.0, c)
        p = pose_step(Pose(), 0.1, omega, 0.5)
        assert p.theta > 0

    def test_rotational_symmetry(self):
        phi = 0.83
        a = pose_step(Pose(0, 0, 0.2), 0.4, 0.9, 0.7)
        b = pose_step(Pose(0, 0, normalize_angle(0.2 + phi)), 0.4, 0.9, 0.7)
        rot_x = a.x * math.cos(phi) - a.y * math.sin(phi)
        rot_y = a.x * math.sin(phi) + a.y * math.cos(phi)
        assert b.x == pytest.approx(rot_x, abs=1e-12)
        assert b.y == pytest.approx(rot_y, abs=1e-12)


class TestNormalize:
    @pytest.mark.parametrize("theta,expected", [
        (0.0, 0.0),
        (math.pi, math.pi),
        (-math.pi, math.pi),
        (3 * math.pi, math.pi),
        (2 * math.pi, 0.0),
    ])
    def test_wraps_into_half_open_interval(self, theta, expected):
        assert normalize_angle(theta) == pytest.approx(expected)
        assert -math.pi < normalize_angle(theta) <= math.pi

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ChassisConfig(wheel_radius=0.0)
        with pytest.raises(ValueError):
            ChassisConfig(weight_front_fraction=1.5)
