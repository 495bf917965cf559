"""Deterministic emulator of the car's microcontroller sketch.

Models the control loop as a value-in/value-out state machine: serial bytes
land in a 64-byte receive FIFO, recognized command bytes update the current
motion intent, and an intent change drives the H-bridge pins through a fixed
execution table. Forward and back begin with a 500 ms full-duty boost during
which the loop is "blocked" (no serial processing), mirroring a blocking
delay in the real sketch; afterwards duty settles to the sustain level.

Each applied intent queues one acknowledgement line (CRLF-terminated) on the
transmit buffer for the host.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .protocol import Command, decode_command

RX_CAPACITY = 64
BOOST_MS = 500.0
BOOST_DUTY = 255
SUSTAIN_DUTY = 100
TURN_FAST_DUTY = 200
TURN_SLOW_DUTY = 60
MAX_STEP_MS = 50.0


class PinLevel(Enum):
    LOW = 0
    HIGH = 1


LOW = PinLevel.LOW
HIGH = PinLevel.HIGH


class MotionIntent(Enum):
    NONE = "none"
    FORWARD = "forward"
    LEFT = "left"
    BACK = "back"
    RIGHT = "right"
    STOP = "stop"


COMMAND_TO_INTENT = {
    Command.FORWARD: MotionIntent.FORWARD,
    Command.LEFT: MotionIntent.LEFT,
    Command.BACK: MotionIntent.BACK,
    Command.RIGHT: MotionIntent.RIGHT,
    Command.STOP: MotionIntent.STOP,
}

TELEMETRY_LINES = {
    MotionIntent.FORWARD: "Straight",
    MotionIntent.BACK: "Back",
    MotionIntent.LEFT: "Left",
    MotionIntent.RIGHT: "Right",
    MotionIntent.STOP: "Stop",
}


@dataclass(frozen=True)
class HBridgeState:
    """Pin levels and 8-bit PWM duties on the motor driver.

    Channel A (in1, in2, enA) is the left side; channel B (in3, in4, enB)
    is the right side.
    """

    in1: PinLevel = LOW
    in2: PinLevel = LOW
    in3: PinLevel = LOW
    in4: PinLevel = LOW
    enA: int = 0
    enB: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.enA <= 255 and 0 <= self.enB <= 255):
            raise ValueError("PWM duty out of 0..255 range")


@dataclass(frozen=True)
class FirmwareState:
    check: MotionIntent = MotionIntent.NONE
    hbridge: HBridgeState = HBridgeState()
    boost_remaining: float = 0.0
    rx_buffer: tuple[int, ...] = ()
    tx_out: bytes = b""


def initial_state() -> FirmwareState:
    return FirmwareState()


def reset(st: FirmwareState) -> FirmwareState:
    """Return the canonical power-on state."""
    return FirmwareState()


def ingest_byte(st: FirmwareState, b: int) -> FirmwareState:
    """Append one received byte to the rx FIFO; drop it if the FIFO is full."""
    if len(st.rx_buffer) >= RX_CAPACITY:
        return st
    return replace(st, rx_buffer=st.rx_buffer + (b,))


def execution_table(
    intent: MotionIntent,
) -> tuple[tuple[PinLevel, PinLevel, PinLevel, PinLevel], tuple[int, int], bool]:
    """Map an intent to (pin pattern, sustain duties (enA, enB), boost flag).

    Left and right turns reuse the forward pin pattern with an asymmetric
    duty split (the faster side is the outside of the turn); only forward
    and back get the initial boost phase.
    """
    if intent == MotionIntent.FORWARD:
        return (HIGH, LOW, HIGH, LOW), (SUSTAIN_DUTY, SUSTAIN_DUTY), True
    if intent == MotionIntent.BACK:
        return (LOW, HIGH, LOW, HIGH), (SUSTAIN_DUTY, SUSTAIN_DUTY), True
    if intent == MotionIntent.LEFT:
        # Right side faster -> CCW -> left turn.
        return (HIGH, LOW, HIGH, LOW), (TURN_SLOW_DUTY, TURN_FAST_DUTY), False
    if intent == MotionIntent.RIGHT:
        return (HIGH, LOW, HIGH, LOW), (TURN_FAST_DUTY, TURN_SLOW_DUTY), False
    if intent == MotionIntent.STOP:
        return (LOW, LOW, LOW, LOW), (0, 0), False
    raise ValueError("execution_table requires a concrete intent, not NONE")


def step(st: FirmwareState, dt: float) -> FirmwareState:
    """Advance the firmware loop by dt milliseconds.

    While the boost timer runs, the loop is blocked: no serial draining, the
    timer just counts down, and duties fall to sustain when it expires.
    Otherwise the rx FIFO is drained, the latest recognized command wins,
    and an intent *change* applies the execution table and queues one
    acknowledgement line.
    """
    if not 0 < dt <= MAX_STEP_MS:
        raise ValueError(f"step dt must be in (0, {MAX_STEP_MS}] ms, got {dt}")

    if st.boost_remaining > 0:
        remaining = max(0.0, st.boost_remaining - dt)
        hb = st.hbridge
        if remaining == 0.0:
            _, sustain, _ = execution_table(st.check)
            hb = replace(hb, enA=sustain[0], enB=sustain[1])
        return replace(st, boost_remaining=remaining, hbridge=hb)

    check = st.check
    for b in st.rx_buffer:
        cmd = decode_command(b)
        if cmd is not None:
            check = COMMAND_TO_INTENT[cmd]
    new = replace(st, rx_buffer=())

    if check != st.check:
        pins, sustain, boost = execution_table(check)
        duties = (BOOST_DUTY, BOOST_DUTY) if boost else sustain
        hb = HBridgeState(*pins, enA=duties[0], enB=duties[1])
        tx = st.tx_out + (TELEMETRY_LINES[check] + "\r\n").encode("ascii")
        new = replace(
            new,
            check=check,
            hbridge=hb,
            # The boost window starts inside this step, so dt has already
            # elapsed out of it.
            boost_remaining=BOOST_MS - dt if boost else 0.0,
            tx_out=tx,
        )
    return new


def drain_tx(st: FirmwareState) -> tuple[FirmwareState, bytes]:
    """Return and clear the pending transmit bytes, order preserved."""
    return replace(st, tx_out=b""), st.tx_out
