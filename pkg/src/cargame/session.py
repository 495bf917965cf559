"""Session orchestrator: the fixed-timestep pipeline plus record/replay.

Each tick moves virtual time forward and runs, in order: link delivery into
the firmware, the firmware loop, telemetry back over the link, the
electrical drivetrain, battery depletion, planar kinematics, and finally
collision/goal checks against the course. Everything is driven by the
session config and its seed, so a (config, command schedule) pair fully
determines the event stream; record/replay leans on that.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from typing import Any

from . import course as course_mod
from . import drivetrain, dynamics, firmware, protocol, transport
from .course import Course
from .drivetrain import BatteryState, SurfaceModel
from .dynamics import ChassisConfig, FourWheel, Pose, TwoWheelCaster
from .protocol import Command
from .transport import LinkConfig

RUNLOG_VERSION = 1
BATTERY_LOW_FRACTION = 0.85

LAYOUT_NAMES = {"caster": TwoWheelCaster(False),
                "caster-locked": TwoWheelCaster(True),
                "4wd": FourWheel()}


class ReplayError(Exception):
    pass


@dataclass(frozen=True)
class SessionConfig:
    tick: float = 10.0  # ms
    chassis: ChassisConfig = field(default_factory=ChassisConfig)
    battery: BatteryState = field(default_factory=drivetrain.aa_alkaline)
    surface: SurfaceModel = drivetrain.SMOOTH
    link: LinkConfig = LinkConfig()
    course: Course = field(default_factory=course_mod.default_course)
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1.0 <= self.tick <= 50.0:
            raise ValueError("tick must be in [1, 50] ms")


def _layout_to_dict(layout: Any) -> dict[str, Any]:
    if isinstance(layout, FourWheel):
        return {"kind": "4wd"}
    return {"kind": "caster", "locked": layout.locked}


def _layout_from_dict(doc: dict[str, Any]) -> Any:
    if doc.get("kind") == "4wd":
        return FourWheel()
    return TwoWheelCaster(locked=bool(doc.get("locked", False)))


def config_to_dict(cfg: SessionConfig) -> dict[str, Any]:
    ch, b, s, lk = cfg.chassis, cfg.battery, cfg.surface, cfg.link
    return {
        "tick": cfg.tick,
        "seed": cfg.seed,
        "chassis": {
            "wheel_radius": ch.wheel_radius, "track_width": ch.track_width,
            "body_radius": ch.body_radius, "layout": _layout_to_dict(ch.layout),
            "weight_front_fraction": ch.weight_front_fraction,
            "caster_sigma": ch.caster_sigma,
        },
        "battery": {
            "kind": b.kind, "v_nominal": b.v_nominal, "charge": b.charge,
            "charge_full": b.charge_full, "r_internal": b.r_internal,
            "i_max": b.i_max,
        },
        "surface": {"name": s.name, "mu_roll": s.mu_roll,
                    "roughness_sigma": s.roughness_sigma},
        "link": {"latency": lk.latency, "jitter": lk.jitter,
                 "drop_prob": lk.drop_prob, "seed": lk.seed,
                 "bytes_per_second": lk.bytes_per_second},
        "course": course_mod.course_to_dict(cfg.course),
    }


def config_from_dict(doc: dict[str, Any]) -> SessionConfig:
    ch, b, s, lk = doc["chassis"], doc["battery"], doc["surface"], doc["link"]
    return SessionConfig(
        tick=float(doc["tick"]),
        seed=int(doc["seed"]),
        chassis=ChassisConfig(
            wheel_radius=ch["wheel_radius"], track_width=ch["track_width"],
            body_radius=ch["body_radius"], layout=_layout_from_dict(ch["layout"]),
            weight_front_fraction=ch["weight_front_fraction"],
            caster_sigma=ch["caster_sigma"],
        ),
        battery=BatteryState(
            kind=b["kind"], v_nominal=b["v_nominal"], charge=b["charge"],
            charge_full=b["charge_full"], r_internal=b["r_internal"],
            i_max=b["i_max"],
        ),
        surface=SurfaceModel(s["name"], s["mu_roll"], s["roughness_sigma"]),
        link=LinkConfig(**lk),
        course=course_mod.course_from_dict(doc["course"]),
    )


class Session:
    """One simulated car on one course, advanced tick by tick."""

    def __init__(self, config: SessionConfig):
        violations = course_mod.validate(config.course)
        if violations:
            raise course_mod.CourseValidationError(violations)
        self.config = config
        self._course = config.course
        self._entries: list[dict[str, Any]] = []
        self._trace: list[dict[str, Any]] = []
        self._reset_state()

    def _reset_state(self) -> None:
        cfg = self.config
        host_raw, car_raw = transport.make_loopback_pair()
        self._host = transport.wrap_lossy(host_raw, cfg.link)
        self._car = transport.wrap_lossy(
            car_raw, replace(cfg.link, seed=cfg.link.seed + 1))
        self._fw = firmware.initial_state()
        self._left = drivetrain.MotorState()
        self._right = drivetrain.MotorState()
        self._battery = cfg.battery
        self._pose = replace(cfg.course.start, t=0.0)
        self._acc = protocol.LineAccumulator()
        self._rng_left = random.Random(f"{cfg.seed}-wheel-left")
        self._rng_right = random.Random(f"{cfg.seed}-wheel-right")
        self._rng_caster = random.Random(f"{cfg.seed}-caster")
        self._t = 0.0
        self._tick_count = 0
        self._in_collision = False
        self._goal_reached = False
        self._battery_low = False
        self._pending: list[dict[str, Any]] = []

    # -- inputs --------------------------------------------------------------

    @property
    def t(self) -> float:
        """Virtual time in ms."""
        return self._t

    @property
    def pose(self) -> Pose:
        return self._pose

    @property
    def battery(self) -> BatteryState:
        return self._battery

    @property
    def course(self) -> Course:
        return self._course

    def send_command(self, cmd: Command) -> None:
        """Queue one command byte down the host->car link at the current time."""
        byte = protocol.encode_command(cmd)
        self._entries.append({"t": self._t, "data": chr(byte)})
        self._host.send(bytes([byte]), now=self._t)
        self._pending.append(
            {"type": "command_accepted", "t": self._t, "command": cmd.name.lower()})

    def send_bytes(self, data: bytes) -> None:
        """Raw client bytes (replay path); unknown bytes ride along untouched."""
        self._entries.append({"t": self._t, "data": data.decode("latin-1")})
        self._host.send(data, now=self._t)

    def set_course(self, new_course: Course) -> None:
        violations = course_mod.validate(new_course)
        if violations:
            raise course_mod.CourseValidationError(violations)
        self._course = new_course
        self._in_collision = False
        self._goal_reached = False

    def reset(self) -> None:
        """Back to the initial state; recording starts over as well."""
        self._course = self.config.course
        self._entries = []
        self._trace = []
        self._reset_state()

    # -- the pipeline --------------------------------------------------------

    def tick(self) -> list[dict[str, Any]]:
        """Advance one tick; returns the events it produced, in order."""
        cfg = self.config
        events = self._pending
        self._pending = []
        dt_ms = cfg.tick
        dt_s = dt_ms / 1000.0
        now = self._t + dt_ms

        # 1-3: link -> firmware -> link
        for b in self._car.poll(now):
            self._fw = firmware.ingest_byte(self._fw, b)
        self._fw = firmware.step(self._fw, dt_ms)
        self._fw, tx = firmware.drain_tx(self._fw)
        if tx:
            self._car.send(tx, now=now)
        self._acc, telemetry = protocol.accumulate_telemetry(
            self._acc, self._host.poll(now))
        for ev in telemetry:
            events.append({"type": "telemetry", "t": now,
                           "event": ev.kind.value, "raw": ev.raw})

        # 4-5: drivetrain and battery
        left_cmd, right_cmd = drivetrain.hbridge_decode(self._fw.hbridge)
        channels = 2 if isinstance(cfg.chassis.layout, FourWheel) else 1
        left_cmd, right_cmd = drivetrain.clamp_drive(
            left_cmd, right_cmd, self._battery, channels_per_side=channels)
        i_total = drivetrain.current_draw(left_cmd, right_cmd, channels)
        v_term = drivetrain.battery_terminal_voltage(self._battery, i_total)
        self._left = drivetrain.motor_step(
            self._left, left_cmd, v_term, cfg.surface, dt_s, self._rng_left)
        self._right = drivetrain.motor_step(
            self._right, right_cmd, v_term, cfg.surface, dt_s, self._rng_right)
        self._battery = drivetrain.battery_step(self._battery, i_total, dt_s)

        # 6: kinematics
        v, omega = dynamics.body_twist(
            self._left.omega, self._right.omega, cfg.chassis)
        if v != 0.0:
            # A caster only swivels when the car is actually translating.
            omega += dynamics.caster_disturbance(cfg.chassis, self._rng_caster)
        self._pose = dynamics.pose_step(self._pose, v, omega, dt_s)
        self._t = now
        self._tick_count += 1

        pose_event = {
            "type": "pose_update", "t": now,
            "x": self._pose.x, "y": self._pose.y, "theta": self._pose.theta,
            "omega_left": self._left.omega, "omega_right": self._right.omega,
            "battery_v": v_term,
        }
        events.append(pose_event)
        self._trace.append(pose_event)

        # 7: course checks
        hit = course_mod.check_collision(
            self._pose, cfg.chassis.body_radius, self._course)
        if hit is not None and not self._in_collision:
            events.append({"type": "collision", "t": now, "obstacle_id": hit})
        self._in_collision = hit is not None

        goal = self._course.goal
        if not self._goal_reached:
            dx, dy = self._pose.x - goal.x, self._pose.y - goal.y
            if dx * dx + dy * dy < goal.radius * goal.radius:
                self._goal_reached = True
                events.append({"type": "goal_reached", "t": now})

        v_noload = drivetrain.battery_terminal_voltage(self._battery, 0.0)
        if not self._battery_low and v_noload < BATTERY_LOW_FRACTION * self._battery.v_nominal:
            self._battery_low = True
            events.append({"type": "battery_low", "t": now, "volts": v_noload})

        return events

    def run(self, ticks: int) -> list[dict[str, Any]]:
        events: list[dict[str, Any]] = []
        for _ in range(ticks):
            events.extend(self.tick())
        return events

    # -- record / replay -----------------------------------------------------

    def run_log(self) -> "RunLog":
        return RunLog(self.config, list(self._entries), list(self._trace))


def _trace_hash(trace: list[dict[str, Any]]) -> str:
    blob = json.dumps(trace, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class RunLog:
    config: SessionConfig
    entries: list[dict[str, Any]]  # {"t": ms, "data": latin-1 string}
    trace: list[dict[str, Any]]  # recorded pose_update events

    def to_json(self) -> bytes:
        doc = {
            "v": RUNLOG_VERSION,
            "config": config_to_dict(self.config),
            "entries": self.entries,
            "trace": self.trace,
            "trace_sha256": _trace_hash(self.trace),
        }
        return json.dumps(doc, indent=2).encode("utf-8")

    @classmethod
    def from_json(cls, data: bytes) -> "RunLog":
        try:
            doc = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ReplayError(f"malformed run log: {e}") from e
        if doc.get("v") != RUNLOG_VERSION:
            raise ReplayError(f"unsupported run log version {doc.get('v')!r}")
        try:
            config = config_from_dict(doc["config"])
            log = cls(config, doc["entries"], doc["trace"])
        except (KeyError, TypeError, ValueError, course_mod.CourseError) as e:
            raise ReplayError(f"invalid run log config: {e}") from e
        if doc.get("trace_sha256") != _trace_hash(log.trace):
            raise ReplayError("trace hash mismatch: log was modified")
        return log


def replay(log: RunLog) -> list[dict[str, Any]]:
    """Re-run a log's command schedule under its config; returns the trace."""
    session = Session(log.config)
    pending = sorted(log.entries, key=lambda e: e["t"])
    i = 0
    for _ in range(len(log.trace)):
        while i < len(pending) and pending[i]["t"] <= session.t:
            session.send_bytes(pending[i]["data"].encode("latin-1"))
            i += 1
        session.tick()
    return session.run_log().trace


def verify_replay(log: RunLog) -> tuple[bool, int | None]:
    """Replay and compare bitwise against the recorded trace.

    Returns (ok, first divergent tick index or None).
    """
    fresh = replay(log)
    for i, (a, b) in enumerate(zip(log.trace, fresh)):
        if a != b:
            return False, i
    if len(fresh) != len(log.trace):
        return False, min(len(fresh), len(log.trace))
    return True, None
