"""Byte-stream links between host and car.

Endpoints run on virtual time: `send` stamps bytes with the sender's current
time and `poll(now)` returns everything whose delivery time has passed. The
transport owns no clock, so whole sessions can be fast-forwarded or replayed
deterministically. A lossy wrapper adds fixed latency, seeded jitter,
serialization time, and byte drops; a termios-backed adapter bridges a real
serial device for hardware-conformance runs.
"""

from __future__ import annotations

import os
import random
import threading
from collections import deque
from dataclasses import dataclass
from typing import Protocol


@dataclass(frozen=True)
class LinkConfig:
    latency: float = 0.0  # ms
    jitter: float = 0.0  # ms, uniform in [0, jitter)
    drop_prob: float = 0.0
    seed: int = 0
    bytes_per_second: float = 960.0  # 9600 baud / 10 bits per byte

    def __post_init__(self) -> None:
        if self.latency < 0 or self.jitter < 0:
            raise ValueError("latency and jitter must be nonnegative")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ValueError("drop_prob must be in [0, 1]")
        if self.bytes_per_second <= 0:
            raise ValueError("bytes_per_second must be positive")


class Endpoint(Protocol):
    def send(self, data: bytes, now: float = 0.0) -> None: ...
    def poll(self, now: float) -> bytes: ...


class LoopbackEndpoint:
    """One side of an in-memory, lossless, zero-delay byte pipe."""

    def __init__(self) -> None:
        self._inbox: deque[tuple[float, int]] = deque()
        self._lock = threading.Lock()
        self._peer: "LoopbackEndpoint | None" = None
        self._last_delivery = float("-inf")

    def _deposit(self, data: bytes, at: float) -> None:
        with self._lock:
            # Delivery times are made monotonic so the pipe never reorders.
            at = max(at, self._last_delivery)
            self._last_delivery = at
            for b in data:
                self._inbox.append((at, b))

    def send(self, data: bytes, now: float = 0.0) -> None:
        assert self._peer is not None, "endpoint not paired"
        self._peer._deposit(data, now)

    def poll(self, now: float) -> bytes:
        out = bytearray()
        with self._lock:
            while self._inbox and self._inbox[0][0] <= now:
                out.append(self._inbox.popleft()[1])
        return bytes(out)


def make_loopback_pair() -> tuple[LoopbackEndpoint, LoopbackEndpoint]:
    a, b = LoopbackEndpoint(), LoopbackEndpoint()
    a._peer, b._peer = b, a
    return a, b


class LossyEndpoint:
    """Latency/jitter/drop injection on the send direction of an endpoint.

    Each surviving byte sent at time t is rescheduled to
    max(previous schedule, t + latency + U(0, jitter) + serialization time),
    so ordering is preserved under any configuration. Deterministic for a
    fixed seed. Wrap each side to shape both directions.
    """

    def __init__(self, inner: Endpoint, cfg: LinkConfig):
        self._inner = inner
        self._cfg = cfg
        self._rng = random.Random(cfg.seed)
        self._last = float("-inf")

    def send(self, data: bytes, now: float = 0.0) -> None:
        cfg = self._cfg
        per_byte_ms = 1000.0 / cfg.bytes_per_second
        for b in data:
            if cfg.drop_prob > 0 and self._rng.random() < cfg.drop_prob:
                continue
            jitter = self._rng.uniform(0.0, cfg.jitter) if cfg.jitter > 0 else 0.0
            at = max(self._last, now + cfg.latency + jitter + per_byte_ms)
            self._last = at
            self._inner.send(bytes([b]), now=at)

    def poll(self, now: float) -> bytes:
        return self._inner.poll(now)


def wrap_lossy(e: Endpoint, cfg: LinkConfig) -> LossyEndpoint:
    return LossyEndpoint(e, cfg)


# -- Real serial device (hardware conformance only) --------------------------


class SerialOpenError(OSError):
    pass


class LinkDownError(OSError):
    pass


class SerialEndpoint:
    """Endpoint over an OS serial device, 8N1, non-blocking.

    Virtual-time arguments are ignored; the device delivers on its own
    schedule. I/O failures latch a link-down condition.
    """

    def __init__(self, path: str, baud: int = 9600):
        import termios

        speed = getattr(termios, f"B{baud}", None)
        if speed is None:
            raise ValueError(f"unsupported baud rate {baud}")
        try:
            self._fd = os.open(path, os.O_RDWR | os.O_NOCTTY | os.O_NONBLOCK)
        except OSError as e:
            raise SerialOpenError(f"cannot open {path}: {e.strerror}") from e
        try:
            attrs = termios.tcgetattr(self._fd)
            attrs[0] = 0  # iflag
            attrs[1] = 0  # oflag
            attrs[2] = termios.CS8 | termios.CREAD | termios.CLOCAL  # cflag
            attrs[3] = 0  # lflag
            attrs[4] = speed  # ispeed
            attrs[5] = speed  # ospeed
            attrs[6][termios.VMIN] = 0
            attrs[6][termios.VTIME] = 0
            termios.tcsetattr(self._fd, termios.TCSANOW, attrs)
        except termios.error as e:
            os.close(self._fd)
            raise SerialOpenError(f"cannot configure {path}: {e}") from e
        self._down = False

    def _check_up(self) -> None:
        if self._down:
            raise LinkDownError("serial link is down")

    def send(self, data: bytes, now: float = 0.0) -> None:
        self._check_up()
        try:
            while data:
                n = os.write(self._fd, data)
                data = data[n:]
        except BlockingIOError:
            raise
        except OSError as e:
            self._down = True
            raise LinkDownError(str(e)) from e

    def poll(self, now: float = 0.0) -> bytes:
        self._check_up()
        try:
            return os.read(self._fd, 4096)
        except BlockingIOError:
            return b""
        except OSError as e:
            self._down = True
            raise LinkDownError(str(e)) from e

    def close(self) -> None:
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1


def open_serial(path: str, baud: int = 9600) -> SerialEndpoint:
    return SerialEndpoint(path, baud)
