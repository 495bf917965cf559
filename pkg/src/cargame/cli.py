"""Command-line entry point.

Subcommands:
  sim          run a simulated session (headless and/or served over TCP)
  replay       re-run a recorded log, optionally verifying bit-for-bit
  validate     check a course file
  conformance  drive the command/telemetry vectors over a real serial port

Exit codes: 0 success, 1 validation/verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import course as course_mod
from . import drivetrain, session as session_mod, transport
from .dynamics import ChassisConfig
from .firmware import TELEMETRY_LINES, COMMAND_TO_INTENT
from .protocol import Command, LineAccumulator, accumulate_telemetry, encode_command
from .service import SessionServer
from .session import RunLog, Session, SessionConfig, LAYOUT_NAMES
from .transport import LinkConfig


def _build_config(args: argparse.Namespace) -> SessionConfig:
    if args.course:
        course = course_mod.load(Path(args.course).read_bytes())
    else:
        course = course_mod.default_course()
    chassis = replace(ChassisConfig(), layout=LAYOUT_NAMES[args.layout])
    return SessionConfig(
        course=course,
        chassis=chassis,
        battery=drivetrain.BATTERY_PRESETS[args.battery](),
        surface=drivetrain.SURFACE_PRESETS[args.surface],
        link=LinkConfig(latency=args.link_latency, jitter=args.link_jitter,
                        drop_prob=args.drop, seed=args.seed),
        seed=args.seed,
    )


def _cmd_sim(args: argparse.Namespace) -> int:
    try:
        config = _build_config(args)
    except (OSError, course_mod.CourseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    sim = Session(config)

    if args.serve:
        server = SessionServer(sim, address=args.serve,
                               courses_dir=args.courses_dir)
        host, port = server.address
        print(f"serving on {host}:{port} (tick {config.tick} ms)")
        server.run_forever(duration=args.duration if args.headless else None)
    else:
        ticks = int(round(args.duration * 1000.0 / config.tick))
        sim.run(ticks)
        p = sim.pose
        print(f"ran {ticks} ticks ({args.duration} s): "
              f"pose x={p.x:.4f} y={p.y:.4f} theta={p.theta:.4f}, "
              f"battery {sim.battery.charge:.1f} mAh")

    if args.record:
        Path(args.record).write_bytes(sim.run_log().to_json())
        print(f"recorded run log to {args.record}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        log = RunLog.from_json(Path(args.log).read_bytes())
    except (OSError, session_mod.ReplayError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.verify:
        ok, tick = session_mod.verify_replay(log)
        if not ok:
            print(f"FAIL: replay diverges at tick {tick}")
            return 1
        print(f"OK: {len(log.trace)} ticks replayed identically")
        return 0
    trace = session_mod.replay(log)
    if trace:
        last = trace[-1]
        print(f"replayed {len(trace)} ticks: final pose "
              f"x={last['x']:.4f} y={last['y']:.4f} theta={last['theta']:.4f}")
    else:
        print("replayed empty log")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        course_mod.load(Path(args.course).read_bytes())
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except course_mod.CourseValidationError as e:
        for violation in e.violations:
            print(f"violation: {violation}")
        return 1
    except course_mod.CourseParseError as e:
        print(f"parse error: {e}")
        return 1
    print("course is valid")
    return 0


def _cmd_conformance(args: argparse.Namespace) -> int:
    """Send each command byte to a real board and check the ack line."""
    try:
        port = transport.open_serial(args.port, args.baud)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    vectors = [(cmd, TELEMETRY_LINES[COMMAND_TO_INTENT[cmd]]) for cmd in Command]
    failures = 0
    acc = LineAccumulator()
    try:
        for cmd, expected in vectors:
            port.send(bytes([encode_command(cmd)]))
            deadline = time.monotonic() + args.timeout
            got: str | None = None
            while time.monotonic() < deadline and got is None:
                acc, events = accumulate_telemetry(acc, port.poll())
                for ev in events:
                    got = ev.raw
                    break
                time.sleep(0.01)
            ok = got == expected
            failures += 0 if ok else 1
            print(f"{'PASS' if ok else 'FAIL'} '{cmd.value}' -> "
                  f"expected {expected!r}, got {got!r}")
            # Same-intent repeats are transition-triggered, so give the board
            # a moment and interleave a stop between runs of the vector table.
            time.sleep(args.settle)
    except transport.LinkDownError as e:
        print(f"link down: {e}", file=sys.stderr)
        return 1
    finally:
        port.close()
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cargame", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="run a simulated session")
    sim.add_argument("--course", help="course JSON file (default: open field)")
    sim.add_argument("--surface", choices=["smooth", "rough"], default="smooth")
    sim.add_argument("--battery", choices=["aa", "liion"], default="aa")
    sim.add_argument("--layout", choices=sorted(LAYOUT_NAMES), default="caster")
    sim.add_argument("--link-latency", type=float, default=0.0, metavar="MS")
    sim.add_argument("--link-jitter", type=float, default=0.0, metavar="MS")
    sim.add_argument("--drop", type=float, default=0.0, metavar="P")
    sim.add_argument("--seed", type=int, default=0, metavar="N")
    sim.add_argument("--serve", nargs="?", const="", metavar="ADDR",
                     help="serve clients on ADDR (default from CARGAME_ADDR)")
    sim.add_argument("--headless", action="store_true",
                     help="run without waiting for clients")
    sim.add_argument("--record", metavar="FILE", help="write a run log")
    sim.add_argument("--duration", type=float, default=10.0, metavar="S")
    sim.add_argument("--courses-dir", metavar="DIR",
                     help="directory for saved courses when serving")
    sim.set_defaults(func=_cmd_sim)

    rep = sub.add_parser("replay", help="re-run a recorded log")
    rep.add_argument("--log", required=True, metavar="FILE")
    rep.add_argument("--verify", action="store_true",
                     help="fail unless the replayed trace matches bitwise")
    rep.set_defaults(func=_cmd_replay)

    val = sub.add_parser("validate", help="check a course file")
    val.add_argument("--course", required=True, metavar="FILE")
    val.set_defaults(func=_cmd_validate)

    conf = sub.add_parser("conformance", help="check a real board over serial")
    conf.add_argument("--port", required=True, metavar="DEV")
    conf.add_argument("--baud", type=int, default=9600, metavar="N")
    conf.add_argument("--timeout", type=float, default=2.0, metavar="S")
    conf.add_argument("--settle", type=float, default=0.8, metavar="S")
    conf.set_defaults(func=_cmd_conformance)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
