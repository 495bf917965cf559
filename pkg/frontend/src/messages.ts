/** Message and course document types shared with the session service. */

export interface Bounds {
  min_x: number;
  min_y: number;
  max_x: number;
  max_y: number;
}

export interface ObstacleDoc {
  id: number;
  kind: string;
  x: number;
  y: number;
  radius: number;
}

export interface CourseDoc {
  v: number;
  name: string;
  bounds: Bounds;
  start: { x: number; y: number; theta: number };
  goal: { x: number; y: number; radius: number };
  obstacles: ObstacleDoc[];
}

export type CommandKey = "w" | "a" | "s" | "d" | "h";

export type ClientMessage =
  | { type: "cmd"; key: CommandKey }
  | { type: "course_save"; course: CourseDoc }
  | { type: "course_load"; name: string }
  | { type: "reset" };

/** Events the service broadcasts; unknown types are tolerated. */
export interface ServiceEvent {
  type: string;
  [field: string]: unknown;
}

export function isCourseDoc(value: unknown): value is CourseDoc {
  if (typeof value !== "object" || value === null) return false;
  const doc = value as Record<string, unknown>;
  return (
    typeof doc.name === "string" &&
    typeof doc.bounds === "object" &&
    Array.isArray(doc.obstacles)
  );
}
