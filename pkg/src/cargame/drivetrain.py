"""Electrical model: H-bridge pins to per-side motor angular velocity.

The chain is: decode the pin state into per-channel drive commands, sag the
battery terminal voltage under the total current draw, clamp duties when
demand exceeds what the pack can source, then integrate each motor as a
first-order lag toward its duty- and voltage-proportional target speed.
Surface load divides the target (rolling resistance) and optionally jitters
it per wheel (roughness), which is what bends trajectories on rough ground.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum

from .firmware import HIGH, LOW, HBridgeState, PinLevel

# Motor constants. K_V is sized so full sustain duty on smooth ground gives
# roughly 0.26 m/s with the default wheel radius; uncalibrated against any
# physical build.
K_V = 3.3  # rad/s per volt at duty 255
I_RUN = 1.2  # amps drawn by one channel at duty 255
OMEGA_MAX = 30.0  # rad/s
TAU_DRIVEN = 0.15  # s
# Geared motors freewheel to rest quickly; 0.1 s brings any reachable speed
# below 0.01 rad/s within a second of coasting.
TAU_COAST = 0.1  # s
TAU_BRAKE = 0.05  # s


class MotorDirection(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    COAST = "coast"
    BRAKE = "brake"


@dataclass(frozen=True)
class MotorChannelCommand:
    direction: MotorDirection
    duty: int = 0


@dataclass(frozen=True)
class MotorState:
    omega: float = 0.0  # rad/s, positive = forward rotation


@dataclass(frozen=True)
class BatteryState:
    kind: str
    v_nominal: float
    charge: float  # mAh remaining
    charge_full: float
    r_internal: float  # ohms
    i_max: float  # amps the pack can source


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    mu_roll: float = 0.0  # rolling-resistance coefficient
    roughness_sigma: float = 0.0  # per-step multiplicative speed-noise std


SMOOTH = SurfaceModel("smooth", mu_roll=0.0, roughness_sigma=0.0)
ROUGH = SurfaceModel("rough", mu_roll=0.25, roughness_sigma=0.05)


def aa_alkaline() -> BatteryState:
    """Fresh 4xAA pack."""
    return BatteryState("aa_alkaline", v_nominal=6.0, charge=2000.0,
                        charge_full=2000.0, r_internal=0.5, i_max=2.5)


def li_ion() -> BatteryState:
    """2S li-ion pack: higher voltage but a tight current limit, which is
    what starves the asymmetric duty split during turns."""
    return BatteryState("li_ion", v_nominal=7.4, charge=1000.0,
                        charge_full=1000.0, r_internal=0.3, i_max=0.4)


BATTERY_PRESETS = {"aa": aa_alkaline, "liion": li_ion}
SURFACE_PRESETS = {"smooth": SMOOTH, "rough": ROUGH}


def _channel(hi: PinLevel, lo: PinLevel, duty: int) -> MotorChannelCommand:
    if hi == HIGH and lo == LOW:
        return MotorChannelCommand(MotorDirection.FORWARD, duty)
    if hi == LOW and lo == HIGH:
        return MotorChannelCommand(MotorDirection.REVERSE, duty)
    if hi == LOW and lo == LOW:
        return MotorChannelCommand(MotorDirection.COAST, duty)
    return MotorChannelCommand(MotorDirection.BRAKE, duty)


def hbridge_decode(pins: HBridgeState) -> tuple[MotorChannelCommand, MotorChannelCommand]:
    """Decode pin levels into (left, right) channel commands.

    All four pin combinations per channel are defined: (H,L) forward,
    (L,H) reverse, (L,L) coast, (H,H) brake.
    """
    left = _channel(pins.in1, pins.in2, pins.enA)
    right = _channel(pins.in3, pins.in4, pins.enB)
    return left, right


def _is_driven(cmd: MotorChannelCommand) -> bool:
    return cmd.direction in (MotorDirection.FORWARD, MotorDirection.REVERSE)


def current_draw(
    left: MotorChannelCommand,
    right: MotorChannelCommand,
    channels_per_side: int = 1,
    i_run: float = I_RUN,
) -> float:
    """Total amps drawn by the driven channels at their current duties."""
    total = 0.0
    for cmd in (left, right):
        if _is_driven(cmd):
            total += i_run * cmd.duty / 255.0
    return total * channels_per_side


def battery_terminal_voltage(b: BatteryState, i_total: float) -> float:
    """Terminal volts under load: linear depletion droop plus IR sag."""
    if i_total < 0:
        raise ValueError("current draw must be nonnegative")
    v = b.v_nominal * (0.8 + 0.2 * b.charge / b.charge_full) - i_total * b.r_internal
    return max(0.0, v)


def clamp_drive(
    left: MotorChannelCommand,
    right: MotorChannelCommand,
    b: BatteryState,
    channels_per_side: int = 1,
    i_run: float = I_RUN,
) -> tuple[MotorChannelCommand, MotorChannelCommand]:
    """Scale duties down when total demand exceeds the pack's current limit.

    The duty ratio between channels is preserved (up to integer rounding
    toward zero); the absolute split shrinks, which is why a weak pack
    cannot hold the asymmetry a turn needs.
    """
    demand = current_draw(left, right, channels_per_side, i_run)
    if demand <= b.i_max or demand == 0.0:
        return left, right
    scale = b.i_max / demand
    out = []
    for cmd in (left, right):
        if _is_driven(cmd):
            cmd = replace(cmd, duty=int(cmd.duty * scale))
        out.append(cmd)
    return out[0], out[1]


def motor_step(
    m: MotorState,
    cmd: MotorChannelCommand,
    v_term: float,
    s: SurfaceModel,
    dt: float,
    rng: random.Random,
    omega_max: float = OMEGA_MAX,
) -> MotorState:
    """Advance one motor by dt seconds as an exact first-order lag.

    The exact-exponential update (rather than forward Euler) means a 10 ms
    step and ten 1 ms steps land on the same trajectory and never overshoot.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")

    if cmd.direction == MotorDirection.FORWARD:
        sign = 1.0
    elif cmd.direction == MotorDirection.REVERSE:
        sign = -1.0
    else:
        sign = 0.0

    if sign != 0.0:
        tau = TAU_DRIVEN
        target = sign * K_V * v_term * (cmd.duty / 255.0) / (1.0 + s.mu_roll)
        if s.roughness_sigma > 0:
            target *= 1.0 + rng.gauss(0.0, s.roughness_sigma)
    else:
        tau = TAU_BRAKE if cmd.direction == MotorDirection.BRAKE else TAU_COAST
        target = 0.0

    omega = target + (m.omega - target) * math.exp(-dt / tau)
    omega = max(-omega_max, min(omega_max, omega))
    return MotorState(omega)


def battery_step(b: BatteryState, i_total: float, dt: float) -> BatteryState:
    """Deplete charge by i_total amps flowing for dt seconds."""
    if i_total < 0 or dt <= 0:
        raise ValueError("need i_total >= 0 and dt > 0")
    charge = max(0.0, b.charge - i_total * 1000.0 * dt / 3600.0)
    return replace(b, charge=charge)
