/** In-memory stand-in for the session service, mirroring its JSON protocol:
 * hello on connect, cmd → command_accepted + telemetry, course_save with
 * bounds validation, course_load from a named store.
 */

import type { Connection } from "../src/connection.js";
import type {
  ClientMessage,
  CourseDoc,
  ServiceEvent,
} from "../src/messages.js";

const TELEMETRY: Record<string, string> = {
  w: "Straight",
  a: "Left",
  s: "Back",
  d: "Right",
  h: "Stop",
};

export function defaultCourse(name = "open-field"): CourseDoc {
  return {
    v: 1,
    name,
    bounds: { min_x: -5, min_y: -5, max_x: 5, max_y: 5 },
    start: { x: 0, y: 0, theta: 0 },
    goal: { x: 4, y: 0, radius: 0.3 },
    obstacles: [],
  };
}

export class MockService implements Connection {
  connected = true;
  sent: ClientMessage[] = [];
  course: CourseDoc = defaultCourse();
  store = new Map<string, CourseDoc>();
  private handlers: Array<(event: ServiceEvent) => void> = [];

  send(message: ClientMessage): void {
    this.sent.push(JSON.parse(JSON.stringify(message)));
    switch (message.type) {
      case "cmd": {
        if (!(message.key in TELEMETRY)) {
          this.emit({ type: "error", reason: `unknown key ${message.key}` });
          return;
        }
        this.emit({ type: "command_accepted", key: message.key });
        this.emit({ type: "telemetry", raw: TELEMETRY[message.key] });
        break;
      }
      case "course_save": {
        const violations = this.validate(message.course);
        if (violations.length > 0) {
          this.emit({ type: "error", reason: violations.join("; ") });
          return;
        }
        this.course = JSON.parse(JSON.stringify(message.course));
        this.store.set(this.course.name, this.course);
        this.emit({ type: "course", course: this.course });
        break;
      }
      case "course_load": {
        const found = this.store.get(message.name);
        if (!found) {
          this.emit({ type: "error", reason: `no course ${message.name}` });
          return;
        }
        this.course = found;
        this.emit({ type: "course", course: found });
        break;
      }
      case "reset":
        this.emit({ type: "reset" });
        break;
    }
  }

  onEvent(handler: (event: ServiceEvent) => void): void {
    this.handlers.push(handler);
  }

  onStatus(): void {}

  connect(): void {
    this.emit({ type: "hello", tick: 10.0, course: this.course });
  }

  emit(event: ServiceEvent): void {
    for (const h of this.handlers) h(JSON.parse(JSON.stringify(event)));
  }

  private validate(course: CourseDoc): string[] {
    const violations: string[] = [];
    const b = course.bounds;
    for (const o of course.obstacles) {
      if (
        o.x - o.radius < b.min_x ||
        o.x + o.radius > b.max_x ||
        o.y - o.radius < b.min_y ||
        o.y + o.radius > b.max_y
      ) {
        violations.push(`obstacle ${o.id} outside bounds`);
      }
      if (o.radius <= 0) violations.push(`obstacle ${o.id} radius must be > 0`);
    }
    const ids = course.obstacles.map((o) => o.id);
    if (new Set(ids).size !== ids.length) violations.push("duplicate ids");
    return violations;
  }
}
