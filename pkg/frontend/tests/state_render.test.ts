/** View-state reducer and renderer behavior, including the render-budget
 * sanity check with 100 obstacles against a recording fake context. */

import { describe, expect, it } from "vitest";

import type { Canvas2D } from "../src/render.js";
import { fitTransform, render } from "../src/render.js";
import {
  COLLISION_FLASH_MS,
  TELEMETRY_LOG_LIMIT,
  applyEvent,
  initialViewState,
} from "../src/state.js";
import { MockService, defaultCourse } from "./mock_service.js";

function fakeContext(): Canvas2D & { calls: string[] } {
  const calls: string[] = [];
  const record =
    (name: string) =>
    (...args: unknown[]) => {
      calls.push(`${name}(${args.map((a) => String(a)).join(",")})`);
    };
  return {
    calls,
    fillStyle: "",
    strokeStyle: "",
    lineWidth: 1,
    font: "",
    save: record("save"),
    restore: record("restore"),
    clearRect: record("clearRect"),
    fillRect: record("fillRect"),
    strokeRect: record("strokeRect"),
    beginPath: record("beginPath"),
    moveTo: record("moveTo"),
    lineTo: record("lineTo"),
    arc: record("arc"),
    closePath: record("closePath"),
    fill: record("fill"),
    stroke: record("stroke"),
    fillText: record("fillText"),
    translate: record("translate"),
    scale: record("scale"),
    rotate: record("rotate"),
  };
}

const VIEW = { width: 900, height: 700 };

describe("view state reducer", () => {
  it("tracks pose, trail, telemetry, and battery from the event stream", () => {
    const state = initialViewState();
    const service = new MockService();
    service.onEvent((e) => applyEvent(state, e, 0));
    service.connect();
    expect(state.course?.name).toBe("open-field");

    service.emit({ type: "pose_update", t: 10, x: 0.1, y: 0, theta: 0.2,
      battery_v: 5.9 });
    service.emit({ type: "telemetry", raw: "Straight" });
    expect(state.pose.x).toBe(0.1);
    expect(state.batteryVolts).toBe(5.9);
    expect(state.trail.length).toBe(1);
    expect(state.telemetryLog).toEqual(["Straight"]);
  });

  it("caps the telemetry log at the last 50 lines", () => {
    const state = initialViewState();
    for (let i = 0; i < 120; i++) {
      applyEvent(state, { type: "telemetry", raw: `line ${i}` }, 0);
    }
    expect(state.telemetryLog.length).toBe(TELEMETRY_LOG_LIMIT);
    expect(state.telemetryLog[0]).toBe("line 70");
  });

  it("collision flash expires; reset clears trail and goal", () => {
    const state = initialViewState();
    applyEvent(state, { type: "collision", obstacle_id: 3 }, 1000);
    expect(state.collisionFlash).toEqual({
      obstacleId: 3,
      until: 1000 + COLLISION_FLASH_MS,
    });
    applyEvent(state, { type: "goal_reached" }, 1100);
    applyEvent(state, { type: "reset" }, 1200);
    expect(state.goalReached).toBe(false);
    expect(state.collisionFlash).toBeNull();
    expect(state.trail).toEqual([]);
  });

  it("malformed events go to the error log and rendering survives", () => {
    const state = initialViewState();
    state.course = defaultCourse();
    applyEvent(state, { type: "totally_unknown" }, 0);
    applyEvent(state, { type: "error", reason: "nope" }, 0);
    expect(state.errorLog.length).toBe(2);
    render(fakeContext(), state, VIEW, 0); // must not throw
  });
});

describe("renderer", () => {
  it("left-turn pose stream rotates the car glyph CCW on screen", () => {
    const state = initialViewState();
    state.course = defaultCourse();
    const angles: number[] = [];
    for (const theta of [0.0, 0.3, 0.6]) {
      state.pose = { x: 0, y: 0, theta, t: 0 };
      const ctx = fakeContext();
      render(ctx, state, VIEW, 0);
      const rotate = ctx.calls.find((c) => c.startsWith("rotate("))!;
      angles.push(Number(rotate.slice(7, -1)));
    }
    // screen y is flipped, so CCW in the world is a decreasing canvas angle
    expect(angles[0]).toBeGreaterThan(angles[1]);
    expect(angles[1]).toBeGreaterThan(angles[2]);
  });

  it("draws every obstacle and the goal; empty course is bounds + car", () => {
    const state = initialViewState();
    state.course = defaultCourse();
    const empty = fakeContext();
    render(empty, state, VIEW, 0);
    expect(empty.calls.filter((c) => c.startsWith("strokeRect")).length).toBe(1);

    state.course.obstacles = [
      { id: 0, kind: "tree", x: 1, y: 1, radius: 0.3 },
      { id: 1, kind: "stone", x: -1, y: 2, radius: 0.2 },
    ];
    const full = fakeContext();
    render(full, state, VIEW, 0);
    expect(full.calls.filter((c) => c.startsWith("arc")).length).toBeGreaterThan(
      empty.calls.filter((c) => c.startsWith("arc")).length
    );
  });

  it("world-screen transform round-trips and flips y", () => {
    const t = fitTransform(defaultCourse(), VIEW);
    const [sx, sy] = t.toScreen(1.25, -0.5);
    const [wx, wy] = t.toWorld(sx, sy);
    expect(wx).toBeCloseTo(1.25, 9);
    expect(wy).toBeCloseTo(-0.5, 9);
    const [, up] = t.toScreen(0, 1);
    const [, down] = t.toScreen(0, -1);
    expect(up).toBeLessThan(down);
  });

  it("renders 100 obstacles well inside the 20 fps budget", () => {
    const state = initialViewState();
    state.course = defaultCourse();
    for (let i = 0; i < 100; i++) {
      state.course.obstacles.push({
        id: i,
        kind: i % 2 ? "tree" : "stone",
        x: -4 + (i % 10) * 0.8,
        y: -4 + Math.floor(i / 10) * 0.8,
        radius: 0.2,
      });
    }
    for (let i = 0; i < 600; i++) {
      state.trail.push({ x: i / 300, y: Math.sin(i / 50) });
    }
    const ctx = fakeContext();
    const t0 = performance.now();
    for (let frame = 0; frame < 50; frame++) {
      ctx.calls.length = 0;
      render(ctx, state, VIEW, frame);
    }
    const perFrame = (performance.now() - t0) / 50;
    expect(perFrame).toBeLessThan(50); // 20 fps = 50 ms budget
  });
});
