/** View state and the reducer that applies service events to it.
 *
 * Rendering is a pure function of this state; the state mutates only here
 * (service events) and in the authoring controller (local input).
 */

import type { CourseDoc, ServiceEvent } from "./messages.js";

export const TELEMETRY_LOG_LIMIT = 50;
export const TRAIL_LIMIT = 400;
export const COLLISION_FLASH_MS = 400;

export interface PoseView {
  x: number;
  y: number;
  theta: number;
  t: number;
}

export interface ViewState {
  mode: "drive" | "author";
  camera: "fixed" | "follow";
  connected: boolean;
  course: CourseDoc | null;
  pose: PoseView;
  trail: Array<{ x: number; y: number }>;
  telemetryLog: string[];
  batteryVolts: number | null;
  batteryLow: boolean;
  collisionFlash: { obstacleId: number; until: number } | null;
  goalReached: boolean;
  errorLog: string[];
}

export function initialViewState(): ViewState {
  return {
    mode: "drive",
    camera: "fixed",
    connected: false,
    course: null,
    pose: { x: 0, y: 0, theta: 0, t: 0 },
    trail: [],
    telemetryLog: [],
    batteryVolts: null,
    batteryLow: false,
    collisionFlash: null,
    goalReached: false,
    errorLog: [],
  };
}

function num(value: unknown, fallback = 0): number {
  return typeof value === "number" && Number.isFinite(value) ? value : fallback;
}

/** Apply one service event in place; `nowMs` drives the flash timer. */
export function applyEvent(
  state: ViewState,
  event: ServiceEvent,
  nowMs: number
): void {
  switch (event.type) {
    case "hello":
    case "course":
      if (typeof event.course === "object" && event.course !== null) {
        state.course = event.course as CourseDoc;
      }
      break;
    case "pose_update": {
      state.pose = {
        x: num(event.x),
        y: num(event.y),
        theta: num(event.theta),
        t: num(event.t),
      };
      if (typeof event.battery_v === "number") {
        state.batteryVolts = event.battery_v;
      }
      const last = state.trail[state.trail.length - 1];
      if (!last || last.x !== state.pose.x || last.y !== state.pose.y) {
        state.trail.push({ x: state.pose.x, y: state.pose.y });
        if (state.trail.length > TRAIL_LIMIT) state.trail.shift();
      }
      break;
    }
    case "telemetry":
      state.telemetryLog.push(String(event.raw ?? ""));
      if (state.telemetryLog.length > TELEMETRY_LOG_LIMIT) {
        state.telemetryLog.shift();
      }
      break;
    case "collision":
      state.collisionFlash = {
        obstacleId: num(event.obstacle_id, -1),
        until: nowMs + COLLISION_FLASH_MS,
      };
      break;
    case "goal_reached":
      state.goalReached = true;
      break;
    case "battery_low":
      state.batteryLow = true;
      break;
    case "reset":
      state.trail = [];
      state.goalReached = false;
      state.collisionFlash = null;
      break;
    case "command_accepted":
      break; // telemetry echo is the interesting part
    case "error":
    case "malformed":
      state.errorLog.push(String(event.reason ?? event.raw ?? "unknown error"));
      if (state.errorLog.length > TELEMETRY_LOG_LIMIT) state.errorLog.shift();
      break;
    default:
      // unknown event types are logged and otherwise ignored
      state.errorLog.push(`unhandled event type ${JSON.stringify(event.type)}`);
      if (state.errorLog.length > TELEMETRY_LOG_LIMIT) state.errorLog.shift();
  }
}
