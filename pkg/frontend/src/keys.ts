/** Drive-mode keyboard input: one cmd message per physical keypress.
 *
 * Stop is an explicit H press; key release sends nothing. OS auto-repeat
 * is suppressed both via the event's `repeat` flag and a held-key set, so
 * holding W for any duration emits exactly one cmd.
 */

import type { ClientMessage, CommandKey } from "./messages.js";

const KEY_MAP: Record<string, CommandKey> = {
  w: "w",
  a: "a",
  s: "s",
  d: "d",
  h: "h",
};

export interface KeyEventLike {
  key: string;
  repeat?: boolean;
}

export class KeyInput {
  private held = new Set<string>();

  constructor(private sendMessage: (message: ClientMessage) => void) {}

  /** Returns the cmd message sent, or null if the event was swallowed. */
  keydown(event: KeyEventLike): ClientMessage | null {
    const key = KEY_MAP[event.key.toLowerCase()];
    if (key === undefined) return null;
    if (event.repeat || this.held.has(key)) return null;
    this.held.add(key);
    const message: ClientMessage = { type: "cmd", key };
    this.sendMessage(message);
    return message;
  }

  keyup(event: KeyEventLike): void {
    const key = KEY_MAP[event.key.toLowerCase()];
    if (key !== undefined) this.held.delete(key);
  }

  /** Clear held state, e.g. when the window loses focus mid-press. */
  reset(): void {
    this.held.clear();
  }
}
