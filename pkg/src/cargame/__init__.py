"""Hardware-free simulator of a serial-controlled Arduino drive car.

Layers, bottom up: `protocol` (wire bytes and telemetry lines), `firmware`
(sketch emulator), `drivetrain` (H-bridge to wheel speeds), `dynamics`
(planar kinematics), `course` (obstacle world), `transport` (virtual and
real serial links), `session` (the tick pipeline, record/replay), `service`
(JSON-over-TCP streaming), `cli` (entry point).
"""

from .protocol import Command, TelemetryEvent, TelemetryKind
from .session import Session, SessionConfig

__all__ = ["Command", "TelemetryEvent", "TelemetryKind", "Session", "SessionConfig"]
__version__ = "0.1.0"
