/** Author-mode controller: optimistic course edits reconciled against the
 * service.
 *
 * Palette drops add obstacles, dragging moves them, Delete removes the
 * selection; Save sends course_save. Out-of-bounds placements are rejected
 * locally (visual snap-back) and any service rejection reverts to the last
 * accepted course.
 */

import type {
  ClientMessage,
  CourseDoc,
  ObstacleDoc,
  ServiceEvent,
} from "./messages.js";

export const PALETTE_KINDS = ["tree", "stone", "custom"] as const;
export type PaletteKind = (typeof PALETTE_KINDS)[number];
export const DEFAULT_OBSTACLE_RADIUS = 0.25;

export type DragState =
  | { kind: "palette"; palette: PaletteKind }
  | { kind: "obstacle"; id: number }
  | null;

function cloneCourse(course: CourseDoc): CourseDoc {
  return JSON.parse(JSON.stringify(course)) as CourseDoc;
}

function inBounds(course: CourseDoc, o: ObstacleDoc): boolean {
  const b = course.bounds;
  return (
    o.x - o.radius >= b.min_x &&
    o.x + o.radius <= b.max_x &&
    o.y - o.radius >= b.min_y &&
    o.y + o.radius <= b.max_y
  );
}

export class AuthorController {
  /** Last course the service accepted; edits revert to this on rejection. */
  private accepted: CourseDoc | null = null;
  /** Working copy with optimistic local edits. */
  course: CourseDoc | null = null;
  selectedId: number | null = null;
  drag: DragState = null;
  /** Obstacle id wearing an inline error badge, if any. */
  rejectedId: number | null = null;
  saving = false;

  constructor(private sendMessage: (message: ClientMessage) => void) {}

  /** Feed every service event through here to reconcile. */
  handleEvent(event: ServiceEvent): void {
    if (event.type === "hello" || event.type === "course") {
      const doc = event.course as CourseDoc | undefined;
      if (doc) {
        this.accepted = cloneCourse(doc);
        this.course = cloneCourse(doc);
        this.rejectedId = null;
        this.saving = false;
      }
    } else if (event.type === "error" && this.saving) {
      // service rejected our course_save: revert to the accepted layout
      this.course = this.accepted ? cloneCourse(this.accepted) : null;
      this.rejectedId = this.selectedId;
      this.saving = false;
    }
  }

  get dirty(): boolean {
    return JSON.stringify(this.course) !== JSON.stringify(this.accepted);
  }

  beginPaletteDrag(palette: PaletteKind): void {
    this.drag = { kind: "palette", palette };
  }

  beginObstacleDrag(id: number): void {
    this.selectedId = id;
    this.drag = { kind: "obstacle", id };
  }

  /** Drop at course coordinates; returns the affected obstacle id or null
   * if the drop was rejected (out of bounds) or there was no drag. */
  drop(x: number, y: number): number | null {
    const drag = this.drag;
    this.drag = null;
    if (!drag || !this.course) return null;
    if (drag.kind === "palette") {
      const id =
        this.course.obstacles.length === 0
          ? 0
          : 1 + Math.max(...this.course.obstacles.map((o) => o.id));
      const candidate: ObstacleDoc = {
        id,
        kind: drag.palette,
        x,
        y,
        radius: DEFAULT_OBSTACLE_RADIUS,
      };
      if (!inBounds(this.course, candidate)) return null; // snaps back
      this.course.obstacles.push(candidate);
      this.selectedId = id;
      return id;
    }
    const obstacle = this.course.obstacles.find((o) => o.id === drag.id);
    if (!obstacle) return null;
    const moved = { ...obstacle, x, y };
    if (!inBounds(this.course, moved)) return null; // snaps back in place
    obstacle.x = x;
    obstacle.y = y;
    return obstacle.id;
  }

  removeSelected(): boolean {
    if (!this.course || this.selectedId === null) return false;
    const before = this.course.obstacles.length;
    this.course.obstacles = this.course.obstacles.filter(
      (o) => o.id !== this.selectedId
    );
    this.selectedId = null;
    return this.course.obstacles.length < before;
  }

  save(): void {
    if (!this.course) return;
    this.saving = true;
    this.rejectedId = null;
    this.sendMessage({ type: "course_save", course: cloneCourse(this.course) });
  }

  load(name: string): void {
    this.sendMessage({ type: "course_load", name });
  }
}
