/** Service connection abstraction and the WebSocket implementation.
 *
 * The session service speaks newline-delimited JSON over a stream socket;
 * in the browser that stream is reached through a WebSocket (or any
 * TCP-to-WS bridge). Tests substitute a mock implementing `Connection`.
 */

import type { ClientMessage, ServiceEvent } from "./messages.js";

export interface Connection {
  readonly connected: boolean;
  send(message: ClientMessage): void;
  onEvent(handler: (event: ServiceEvent) => void): void;
  onStatus(handler: (connected: boolean) => void): void;
}

export class WebSocketConnection implements Connection {
  private socket: WebSocket;
  private buffer = "";
  private eventHandlers: Array<(event: ServiceEvent) => void> = [];
  private statusHandlers: Array<(connected: boolean) => void> = [];
  connected = false;

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.addEventListener("open", () => this.setConnected(true));
    this.socket.addEventListener("close", () => this.setConnected(false));
    this.socket.addEventListener("message", (e) => this.ingest(String(e.data)));
  }

  send(message: ClientMessage): void {
    if (!this.connected) return; // link down: drop, UI shows the banner
    this.socket.send(JSON.stringify(message) + "\n");
  }

  onEvent(handler: (event: ServiceEvent) => void): void {
    this.eventHandlers.push(handler);
  }

  onStatus(handler: (connected: boolean) => void): void {
    this.statusHandlers.push(handler);
  }

  private setConnected(up: boolean): void {
    this.connected = up;
    for (const h of this.statusHandlers) h(up);
  }

  private ingest(data: string): void {
    this.buffer += data;
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (!line) continue;
      let event: ServiceEvent;
      try {
        event = JSON.parse(line) as ServiceEvent;
      } catch {
        event = { type: "malformed", raw: line };
      }
      for (const h of this.eventHandlers) h(event);
    }
  }
}
