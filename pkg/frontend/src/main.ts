/** Browser entry point: wires the connection, input, authoring, and the
 * render loop together. All interesting logic lives in the pure modules.
 */

import { AuthorController, PALETTE_KINDS, PaletteKind } from "./author.js";
import { WebSocketConnection } from "./connection.js";
import { KeyInput } from "./keys.js";
import { fitTransform, render } from "./render.js";
import { applyEvent, initialViewState } from "./state.js";

const params = new URLSearchParams(window.location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:7708/";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const state = initialViewState();

const connection = new WebSocketConnection(url);
connection.onStatus((up) => {
  state.connected = up;
  if (!up) keys.reset();
});

const keys = new KeyInput((m) => connection.send(m));
const author = new AuthorController((m) => connection.send(m));

connection.onEvent((event) => {
  applyEvent(state, event, performance.now());
  author.handleEvent(event);
  if (author.course) state.course = author.course;
});

window.addEventListener("keydown", (e) => {
  if (state.mode === "drive") {
    keys.keydown(e);
  } else if (e.key === "Delete" || e.key === "Backspace") {
    author.removeSelected();
    if (author.course) state.course = author.course;
  }
  if (e.key === "Tab") {
    e.preventDefault();
    state.mode = state.mode === "drive" ? "author" : "drive";
  }
});
window.addEventListener("keyup", (e) => keys.keyup(e));
window.addEventListener("blur", () => keys.reset());

function worldFromPointer(e: PointerEvent): [number, number] | null {
  if (!state.course) return null;
  const rect = canvas.getBoundingClientRect();
  const t = fitTransform(state.course, {
    width: canvas.width,
    height: canvas.height,
  });
  return t.toWorld(e.clientX - rect.left, e.clientY - rect.top);
}

canvas.addEventListener("pointerdown", (e) => {
  if (state.mode !== "author" || !state.course) return;
  const world = worldFromPointer(e);
  if (!world) return;
  const hit = state.course.obstacles.find(
    (o) => Math.hypot(o.x - world[0], o.y - world[1]) <= o.radius
  );
  if (hit) author.beginObstacleDrag(hit.id);
});

canvas.addEventListener("pointerup", (e) => {
  if (state.mode !== "author") return;
  const world = worldFromPointer(e);
  if (world) author.drop(world[0], world[1]);
  if (author.course) state.course = author.course;
});

for (const kind of PALETTE_KINDS) {
  const button = document.getElementById(`palette-${kind}`);
  button?.addEventListener("pointerdown", () =>
    author.beginPaletteDrag(kind as PaletteKind)
  );
}
document.getElementById("save")?.addEventListener("click", () => author.save());
document
  .getElementById("reset")
  ?.addEventListener("click", () => connection.send({ type: "reset" }));

function frame(): void {
  render(ctx, state, { width: canvas.width, height: canvas.height },
    performance.now());
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
