"""Obstacle-course data model, authoring ops, collisions, scoring, persistence.

Every obstacle is a disc; tree/stone/custom differ only by tag (a rendering
concern). Courses are immutable values: authoring operations return new
courses and reject any edit that would violate the invariants. The persisted
form is a UTF-8 JSON document, schema version 1, with unknown keys ignored
on load for forward compatibility.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

from .dynamics import ChassisConfig, Pose, normalize_angle

SCHEMA_VERSION = 1
DEFAULT_BODY_RADIUS = ChassisConfig().body_radius


class CourseError(Exception):
    pass


class CourseValidationError(CourseError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class CourseParseError(CourseError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at byte {position})"
        super().__init__(message)
        self.position = position


class ObstacleNotFoundError(CourseError):
    def __init__(self, obstacle_id: int):
        super().__init__(f"no obstacle with id {obstacle_id}")
        self.obstacle_id = obstacle_id


@dataclass(frozen=True)
class Obstacle:
    id: int
    kind: str  # "tree", "stone", or a custom label
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class Goal:
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class Bounds:
    min_x: float
    min_y: float
    max_x: float
    max_y: float


@dataclass(frozen=True)
class Course:
    name: str
    bounds: Bounds
    start: Pose
    goal: Goal
    obstacles: tuple[Obstacle, ...] = ()


@dataclass(frozen=True)
class RunResult:
    elapsed: float
    collision_count: int
    reached_goal: bool


def _circle_in_bounds(x: float, y: float, r: float, b: Bounds) -> bool:
    return (
        x - r >= b.min_x and x + r <= b.max_x
        and y - r >= b.min_y and y + r <= b.max_y
    )


def validate(c: Course) -> list[str]:
    """Return all invariant violations; empty list means the course is valid."""
    violations: list[str] = []
    b = c.bounds
    if not (b.max_x > b.min_x and b.max_y > b.min_y):
        violations.append("bounds: degenerate rectangle (max must exceed min)")
    if c.goal.radius <= 0:
        violations.append("goal: radius must be positive")
    elif not _circle_in_bounds(c.goal.x, c.goal.y, c.goal.radius, b):
        violations.append("goal: circle outside bounds")
    seen: set[int] = set()
    for o in c.obstacles:
        if o.id < 0:
            violations.append(f"obstacle {o.id}: id must be nonnegative")
        if o.id in seen:
            violations.append(f"obstacle {o.id}: duplicate id")
        seen.add(o.id)
        if o.radius <= 0:
            violations.append(f"obstacle {o.id}: radius must be positive")
            continue
        if not _circle_in_bounds(o.x, o.y, o.radius, b):
            violations.append(f"obstacle {o.id}: circle outside bounds")
        if math.hypot(c.start.x - o.x, c.start.y - o.y) < DEFAULT_BODY_RADIUS + o.radius:
            violations.append(f"obstacle {o.id}: overlaps the start pose")
    return violations


def check_collision(p: Pose, body_radius: float, c: Course) -> int | None:
    """Lowest obstacle id whose disc overlaps the car disc, if any.

    Tangency (distance exactly equal to the radius sum) is not a collision.
    """
    hit: int | None = None
    for o in c.obstacles:
        if math.hypot(p.x - o.x, p.y - o.y) < body_radius + o.radius:
            if hit is None or o.id < hit:
                hit = o.id
    return hit


def _checked(c: Course) -> Course:
    violations = validate(c)
    if violations:
        raise CourseValidationError(violations)
    return c


def author_add(c: Course, kind: str, x: float, y: float, radius: float) -> tuple[Course, int]:
    """Add an obstacle; returns the new course and the assigned id.

    Ids count up from the maximum ever present, so removed ids are not
    reused within a course value's lineage.
    """
    new_id = 1 + max((o.id for o in c.obstacles), default=-1)
    obstacle = Obstacle(new_id, kind, x, y, radius)
    return _checked(replace(c, obstacles=c.obstacles + (obstacle,))), new_id


def author_move(c: Course, obstacle_id: int, x: float, y: float) -> Course:
    if all(o.id != obstacle_id for o in c.obstacles):
        raise ObstacleNotFoundError(obstacle_id)
    obstacles = tuple(
        replace(o, x=x, y=y) if o.id == obstacle_id else o for o in c.obstacles
    )
    return _checked(replace(c, obstacles=obstacles))


def author_remove(c: Course, obstacle_id: int) -> Course:
    if all(o.id != obstacle_id for o in c.obstacles):
        raise ObstacleNotFoundError(obstacle_id)
    obstacles = tuple(o for o in c.obstacles if o.id != obstacle_id)
    return _checked(replace(c, obstacles=obstacles))


# -- Persistence ------------------------------------------------------------


def course_to_dict(c: Course) -> dict[str, Any]:
    return {
        "v": SCHEMA_VERSION,
        "name": c.name,
        "bounds": {
            "min_x": c.bounds.min_x, "min_y": c.bounds.min_y,
            "max_x": c.bounds.max_x, "max_y": c.bounds.max_y,
        },
        "start": {"x": c.start.x, "y": c.start.y, "theta": c.start.theta},
        "goal": {"x": c.goal.x, "y": c.goal.y, "radius": c.goal.radius},
        "obstacles": [
            {"id": o.id, "kind": o.kind, "x": o.x, "y": o.y, "radius": o.radius}
            for o in c.obstacles
        ],
    }


def _num(doc: dict[str, Any], key: str, where: str) -> float:
    value = doc.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise CourseParseError(f"{where}.{key}: expected a number")
    return float(value)


def course_from_dict(doc: Any) -> Course:
    """Build a course from a parsed document; structural problems raise
    CourseParseError, invariant problems raise CourseValidationError."""
    if not isinstance(doc, dict):
        raise CourseParseError("document root must be an object")
    if doc.get("v") != SCHEMA_VERSION:
        raise CourseParseError(f"unsupported schema version {doc.get('v')!r}")
    name = doc.get("name")
    if not isinstance(name, str):
        raise CourseParseError("name: expected a string")
    for key in ("bounds", "start", "goal"):
        if not isinstance(doc.get(key), dict):
            raise CourseParseError(f"{key}: expected an object")
    bounds = Bounds(
        _num(doc["bounds"], "min_x", "bounds"), _num(doc["bounds"], "min_y", "bounds"),
        _num(doc["bounds"], "max_x", "bounds"), _num(doc["bounds"], "max_y", "bounds"),
    )
    start = Pose(
        _num(doc["start"], "x", "start"), _num(doc["start"], "y", "start"),
        normalize_angle(_num(doc["start"], "theta", "start")),
    )
    goal = Goal(
        _num(doc["goal"], "x", "goal"), _num(doc["goal"], "y", "goal"),
        _num(doc["goal"], "radius", "goal"),
    )
    raw_obstacles = doc.get("obstacles", [])
    if not isinstance(raw_obstacles, list):
        raise CourseParseError("obstacles: expected a list")
    obstacles = []
    for i, entry in enumerate(raw_obstacles):
        where = f"obstacles[{i}]"
        if not isinstance(entry, dict):
            raise CourseParseError(f"{where}: expected an object")
        oid = entry.get("id")
        if not isinstance(oid, int) or isinstance(oid, bool):
            raise CourseParseError(f"{where}.id: expected an integer")
        kind = entry.get("kind")
        if not isinstance(kind, str):
            raise CourseParseError(f"{where}.kind: expected a string")
        obstacles.append(Obstacle(
            oid, kind,
            _num(entry, "x", where), _num(entry, "y", where),
            _num(entry, "radius", where),
        ))
    return _checked(Course(name, bounds, start, goal, tuple(obstacles)))


def save(c: Course) -> bytes:
    """Serialize a valid course to its JSON document."""
    _checked(c)
    return json.dumps(course_to_dict(c), indent=2).encode("utf-8")


def load(data: bytes) -> Course:
    """Parse and validate a course document."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise CourseParseError("document is not valid UTF-8", e.start) from e
    except json.JSONDecodeError as e:
        raise CourseParseError(e.msg, e.pos) from e
    return course_from_dict(doc)


# -- Scoring ----------------------------------------------------------------


def score(
    trace: Sequence[Pose], c: Course, body_radius: float = DEFAULT_BODY_RADIUS
) -> RunResult:
    """Score a time-ordered pose trace against a course.

    Collisions count contact episodes: a new count only after full
    separation since the last overlap. The run ends (for timing purposes)
    when the pose center first enters the goal circle.
    """
    if not trace:
        return RunResult(0.0, 0, False)
    t0 = trace[0].t
    collisions = 0
    in_contact = False
    for p in trace:
        hit = check_collision(p, body_radius, c) is not None
        if hit and not in_contact:
            collisions += 1
        in_contact = hit
        if math.hypot(p.x - c.goal.x, p.y - c.goal.y) < c.goal.radius:
            return RunResult(p.t - t0, collisions, True)
    return RunResult(trace[-1].t - t0, collisions, False)


def default_course(name: str = "open-field") -> Course:
    """Empty 10 m square with the start at the origin."""
    return Course(
        name=name,
        bounds=Bounds(-5.0, -5.0, 5.0, 5.0),
        start=Pose(0.0, 0.0, 0.0),
        goal=Goal(4.0, 0.0, 0.3),
        obstacles=(),
    )
