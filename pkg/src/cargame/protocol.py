"""Wire protocol: single-byte drive commands and newline-delimited telemetry.

Host -> car: one ASCII byte per command ('w', 'a', 's', 'd', 'h').
Car -> host: ASCII acknowledgement lines terminated by CRLF (bare LF also
accepted). Unknown bytes are not commands; unknown lines are preserved
verbatim so hardware-conformance runs can report exactly what a board said.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

# A line that never terminates cannot grow without bound: past this many
# pending bytes the fragment is flushed as an Unknown event.
MAX_LINE_BYTES = 256


class Command(Enum):
    FORWARD = "w"
    LEFT = "a"
    BACK = "s"
    RIGHT = "d"
    STOP = "h"


_BYTE_TO_COMMAND = {ord(c.value): c for c in Command}


class TelemetryKind(Enum):
    MOVED_STRAIGHT = "moved_straight"
    MOVED_BACK = "moved_back"
    TURNED_LEFT = "turned_left"
    TURNED_RIGHT = "turned_right"
    STOPPED = "stopped"
    UNKNOWN = "unknown"


_LINE_TO_KIND = {
    "Straight": TelemetryKind.MOVED_STRAIGHT,
    "Back": TelemetryKind.MOVED_BACK,
    "Left": TelemetryKind.TURNED_LEFT,
    "Right": TelemetryKind.TURNED_RIGHT,
    "Stop": TelemetryKind.STOPPED,
}

# Inverse map used by the firmware emulator when emitting acks.
KIND_TO_LINE = {kind: line for line, kind in _LINE_TO_KIND.items()}


@dataclass(frozen=True)
class TelemetryEvent:
    kind: TelemetryKind
    raw: str


@dataclass(frozen=True)
class LineAccumulator:
    """Buffer for the current unterminated telemetry line."""

    pending: bytes = b""


def encode_command(cmd: Command) -> int:
    """Return the single wire byte for a command."""
    return ord(cmd.value)


def decode_command(b: int) -> Command | None:
    """Return the command for a wire byte, or None for any other byte.

    Unknown bytes are not errors; they are silently non-commands.
    """
    return _BYTE_TO_COMMAND.get(b)


def parse_telemetry_line(line: str) -> TelemetryEvent:
    kind = _LINE_TO_KIND.get(line, TelemetryKind.UNKNOWN)
    return TelemetryEvent(kind, line)


def accumulate_telemetry(
    acc: LineAccumulator, data: bytes
) -> tuple[LineAccumulator, list[TelemetryEvent]]:
    """Feed received bytes, returning the new accumulator and complete events.

    Lines terminate on LF; a single trailing CR is stripped so CRLF and bare
    LF both work. Processing is byte-granular, so any chunking of the same
    stream yields the same event sequence.
    """
    pending = bytearray(acc.pending)
    events: list[TelemetryEvent] = []
    for b in data:
        if b == 0x0A:
            line = bytes(pending)
            if line.endswith(b"\r"):
                line = line[:-1]
            events.append(parse_telemetry_line(line.decode("latin-1")))
            pending.clear()
        else:
            if len(pending) >= MAX_LINE_BYTES:
                events.append(
                    TelemetryEvent(TelemetryKind.UNKNOWN, bytes(pending).decode("latin-1"))
                )
                pending.clear()
            pending.append(b)
    return LineAccumulator(bytes(pending)), events
