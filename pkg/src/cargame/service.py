"""JSON-over-TCP session service.

One simulation loop owns all model state; client connections are handled on
their own threads and funnel parsed messages into the loop through a queue.
Events fan out through bounded per-client queues (drop-oldest), so a slow or
dead client can never stall the simulation.

Wire format: newline-delimited JSON objects, each with a "type" field.
Client -> service: cmd, course_save, course_load, reset.
Service -> client: the session events (command_accepted, telemetry,
pose_update, collision, goal_reached, battery_low) plus hello / course /
reset notifications and per-client error messages.
"""

from __future__ import annotations

import json
import os
import queue
import socket
import threading
import time
from collections import deque
from pathlib import Path
from typing import Any

from . import course as course_mod
from .protocol import Command
from .session import Session

DEFAULT_ADDRESS = "127.0.0.1:7707"
ADDRESS_ENV_VAR = "CARGAME_ADDR"
CLIENT_QUEUE_LIMIT = 1024

KEY_TO_COMMAND = {c.value: c for c in Command}


def resolve_address(address: str | None = None) -> tuple[str, int]:
    raw = address or os.environ.get(ADDRESS_ENV_VAR) or DEFAULT_ADDRESS
    host, _, port = raw.rpartition(":")
    return host, int(port)


class _Client:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.outbox: deque[bytes] = deque(maxlen=CLIENT_QUEUE_LIMIT)
        self.wakeup = threading.Condition()
        self.alive = True

    def enqueue(self, payload: bytes) -> None:
        with self.wakeup:
            self.outbox.append(payload)  # maxlen drops the oldest
            self.wakeup.notify()

    def close(self) -> None:
        with self.wakeup:
            self.alive = False
            self.wakeup.notify()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class SessionServer:
    """Serves one session to any number of clients, paced to the wall clock."""

    def __init__(
        self,
        session: Session,
        address: str | None = None,
        courses_dir: str | Path | None = None,
        pace: bool = True,
    ):
        self.session = session
        self.courses_dir = Path(courses_dir) if courses_dir else None
        self.pace = pace
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind(resolve_address(address))
        self._listener.listen()
        self.address: tuple[str, int] = self._listener.getsockname()
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._inbound: "queue.Queue[tuple[_Client, dict[str, Any]]]" = queue.Queue()
        self._running = False
        self._threads: list[threading.Thread] = []

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        self._running = True
        for target in (self._accept_loop, self._sim_loop):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)

    def run_forever(self, duration: float | None = None) -> None:
        self.start()
        try:
            if duration is None:
                while self._running:
                    time.sleep(0.2)
            else:
                time.sleep(duration)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def stop(self) -> None:
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._clients_lock:
            clients = list(self._clients)
            self._clients.clear()
        for c in clients:
            c.close()

    # -- networking ----------------------------------------------------------

    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, _ = self._listener.accept()
            except OSError:
                return
            client = _Client(sock)
            with self._clients_lock:
                self._clients.append(client)
            hello = {
                "type": "hello",
                "tick": self.session.config.tick,
                "course": course_mod.course_to_dict(self.session.course),
            }
            client.enqueue(json.dumps(hello).encode() + b"\n")
            threading.Thread(target=self._reader, args=(client,), daemon=True).start()
            threading.Thread(target=self._writer, args=(client,), daemon=True).start()

    def _drop(self, client: _Client) -> None:
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)
        client.close()

    def _reader(self, client: _Client) -> None:
        buf = b""
        while self._running and client.alive:
            try:
                chunk = client.sock.recv(4096)
            except OSError:
                break
            if not chunk:
                break
            buf += chunk
            while b"\n" in buf:
                line, buf = buf.split(b"\n", 1)
                if not line.strip():
                    continue
                try:
                    msg = json.loads(line)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be an object")
                except (ValueError, json.JSONDecodeError) as e:
                    self._send_error(client, f"malformed message: {e}")
                    continue
                self._inbound.put((client, msg))
        self._drop(client)

    def _writer(self, client: _Client) -> None:
        while client.alive:
            with client.wakeup:
                while client.alive and not client.outbox:
                    client.wakeup.wait(timeout=1.0)
                if not client.alive:
                    return
                payload = client.outbox.popleft()
            try:
                client.sock.sendall(payload)
            except OSError:
                self._drop(client)
                return

    def _send_error(self, client: _Client, reason: str) -> None:
        client.enqueue(json.dumps({"type": "error", "reason": reason}).encode() + b"\n")

    def _broadcast(self, message: dict[str, Any]) -> None:
        payload = json.dumps(message).encode() + b"\n"
        with self._clients_lock:
            clients = list(self._clients)
        for c in clients:
            c.enqueue(payload)

    # -- simulation loop -----------------------------------------------------

    def _sim_loop(self) -> None:
        tick_s = self.session.config.tick / 1000.0
        start = time.monotonic()
        n = 0
        while self._running:
            while True:
                try:
                    client, msg = self._inbound.get_nowait()
                except queue.Empty:
                    break
                self._handle(client, msg)
            for event in self.session.tick():
                self._broadcast(event)
            n += 1
            if self.pace:
                deadline = start + n * tick_s
                delay = deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)

    def _handle(self, client: _Client, msg: dict[str, Any]) -> None:
        kind = msg.get("type")
        if kind == "cmd":
            cmd = KEY_TO_COMMAND.get(msg.get("key"))
            if cmd is None:
                self._send_error(client, f"unknown key {msg.get('key')!r}")
                return
            self.session.send_command(cmd)
        elif kind == "course_save":
            try:
                new_course = course_mod.course_from_dict(msg.get("course"))
                self.session.set_course(new_course)
            except course_mod.CourseError as e:
                self._send_error(client, str(e))
                return
            if self.courses_dir is not None:
                self.courses_dir.mkdir(parents=True, exist_ok=True)
                path = self.courses_dir / f"{Path(new_course.name).name}.json"
                path.write_bytes(course_mod.save(new_course))
            self._broadcast({"type": "course",
                             "course": course_mod.course_to_dict(new_course)})
        elif kind == "course_load":
            name = msg.get("name")
            if self.courses_dir is None or not isinstance(name, str):
                self._send_error(client, "no course store configured or bad name")
                return
            path = self.courses_dir / f"{Path(name).name}.json"
            try:
                new_course = course_mod.load(path.read_bytes())
                self.session.set_course(new_course)
            except (OSError, course_mod.CourseError) as e:
                self._send_error(client, f"cannot load course {name!r}: {e}")
                return
            self._broadcast({"type": "course",
                             "course": course_mod.course_to_dict(new_course)})
        elif kind == "reset":
            self.session.reset()
            self._broadcast({"type": "reset"})
        else:
            self._send_error(client, f"unknown message type {kind!r}")
