/** Top-down canvas renderer: a pure function of the view state.
 *
 * Draws course bounds, obstacles (glyph per kind), goal, the car as an
 * oriented triangle, a breadcrumb trail, and the HUD. Works against the
 * standard 2D context interface so tests can pass a recording fake.
 */

import type { CourseDoc } from "./messages.js";
import type { ViewState } from "./state.js";

export interface Canvas2D {
  canvas?: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  save(): void;
  restore(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  translate(x: number, y: number): void;
  scale(x: number, y: number): void;
  rotate(theta: number): void;
}

export interface Viewport {
  width: number;
  height: number;
}

const OBSTACLE_COLORS: Record<string, string> = {
  tree: "#2e8b57",
  stone: "#708090",
};
const MARGIN = 20;
const CAR_RADIUS = 0.09; // m, matches the simulator's collision circle

/** World-to-screen transform for a course fitted into the viewport. */
export function fitTransform(course: CourseDoc, view: Viewport) {
  const w = course.bounds.max_x - course.bounds.min_x;
  const h = course.bounds.max_y - course.bounds.min_y;
  const scale = Math.min(
    (view.width - 2 * MARGIN) / w,
    (view.height - 2 * MARGIN) / h
  );
  const cx = (course.bounds.min_x + course.bounds.max_x) / 2;
  const cy = (course.bounds.min_y + course.bounds.max_y) / 2;
  return {
    scale,
    toScreen(x: number, y: number): [number, number] {
      // +y up in the world, +y down on screen
      return [
        view.width / 2 + (x - cx) * scale,
        view.height / 2 - (y - cy) * scale,
      ];
    },
    toWorld(sx: number, sy: number): [number, number] {
      return [cx + (sx - view.width / 2) / scale, cy - (sy - view.height / 2) / scale];
    },
  };
}

function circle(ctx: Canvas2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
}

export function render(
  ctx: Canvas2D,
  state: ViewState,
  view: Viewport,
  nowMs: number
): void {
  ctx.clearRect(0, 0, view.width, view.height);
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, view.width, view.height);

  const course = state.course;
  if (!course) {
    ctx.fillStyle = "#ccc";
    ctx.font = "14px monospace";
    ctx.fillText(
      state.connected ? "waiting for course…" : "link down",
      MARGIN,
      MARGIN + 8
    );
    return;
  }

  const t = fitTransform(course, view);

  // bounds
  const [bx0, by1] = t.toScreen(course.bounds.min_x, course.bounds.min_y);
  const [bx1, by0] = t.toScreen(course.bounds.max_x, course.bounds.max_y);
  ctx.strokeStyle = "#4a5560";
  ctx.lineWidth = 2;
  ctx.strokeRect(bx0, by0, bx1 - bx0, by1 - by0);

  // goal
  const [gx, gy] = t.toScreen(course.goal.x, course.goal.y);
  ctx.fillStyle = state.goalReached ? "#ffd700" : "#1e6f3c";
  circle(ctx, gx, gy, course.goal.radius * t.scale);
  ctx.fill();

  // obstacles, with collision flash and rejection badge
  const flash =
    state.collisionFlash && state.collisionFlash.until > nowMs
      ? state.collisionFlash.obstacleId
      : null;
  for (const o of course.obstacles) {
    const [ox, oy] = t.toScreen(o.x, o.y);
    const r = o.radius * t.scale;
    ctx.fillStyle =
      o.id === flash ? "#ff3030" : OBSTACLE_COLORS[o.kind] ?? "#b08d57";
    circle(ctx, ox, oy, r);
    ctx.fill();
    if (o.kind === "tree") {
      ctx.fillStyle = "#5b3a1e"; // trunk dot
      circle(ctx, ox, oy, Math.max(2, r * 0.25));
      ctx.fill();
    }
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 1;
    circle(ctx, ox, oy, r);
    ctx.stroke();
  }

  // breadcrumb trail
  if (state.trail.length > 1) {
    ctx.strokeStyle = "#3fa7d6";
    ctx.lineWidth = 1;
    ctx.beginPath();
    const [sx, sy] = t.toScreen(state.trail[0].x, state.trail[0].y);
    ctx.moveTo(sx, sy);
    for (const p of state.trail.slice(1)) {
      const [px, py] = t.toScreen(p.x, p.y);
      ctx.lineTo(px, py);
    }
    ctx.stroke();
  }

  // car: oriented triangle at the pose
  const [carX, carY] = t.toScreen(state.pose.x, state.pose.y);
  const carR = CAR_RADIUS * t.scale;
  ctx.save();
  ctx.translate(carX, carY);
  ctx.rotate(-state.pose.theta); // screen y is flipped
  ctx.fillStyle = "#e8e4d8";
  ctx.beginPath();
  ctx.moveTo(carR * 1.4, 0);
  ctx.lineTo(-carR * 0.8, carR * 0.9);
  ctx.lineTo(-carR * 0.8, -carR * 0.9);
  ctx.closePath();
  ctx.fill();
  ctx.restore();

  renderHud(ctx, state);
}

function renderHud(ctx: Canvas2D, state: ViewState): void {
  ctx.font = "12px monospace";
  let y = MARGIN;
  const line = (text: string, color = "#ccc") => {
    ctx.fillStyle = color;
    ctx.fillText(text, MARGIN / 2, y);
    y += 14;
  };
  if (!state.connected) line("LINK DOWN", "#ff5050");
  line(`mode: ${state.mode}`);
  if (state.batteryVolts !== null) {
    line(
      `battery: ${state.batteryVolts.toFixed(2)} V`,
      state.batteryLow ? "#ff5050" : "#ccc"
    );
  }
  if (state.goalReached) line("GOAL", "#ffd700");
  for (const raw of state.telemetryLog.slice(-5)) line(`> ${raw}`, "#8fa");
  for (const err of state.errorLog.slice(-2)) line(`! ${err}`, "#f88");
}
