// Thin websocket wrapper. Reconnect policy lives with the store; this
// module only opens sockets, parses frames, and writes frames.

import { parseServerMsg, serializeClientMsg } from "./protocol.js";
import type { ClientMsg, ServerMsg } from "./protocol.js";

export interface NetHooks {
  onOpen(): void;
  onMessage(msg: ServerMsg): void;
  onClose(): void;
}

export class Net {
  private socket: WebSocket | null = null;

  constructor(
    private readonly url: string,
    private readonly hooks: NetHooks,
  ) {}

  connect(): void {
    this.close();
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => this.hooks.onOpen();
    socket.onmessage = (event) => {
      const msg = parseServerMsg(String(event.data));
      if (msg !== null) this.hooks.onMessage(msg);
    };
    socket.onclose = () => {
      if (this.socket === socket) {
        this.socket = null;
        this.hooks.onClose();
      }
    };
  }

  send(msg: ClientMsg): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(serializeClientMsg(msg));
    }
  }

  close(): void {
    if (this.socket) {
      const socket = this.socket;
      this.socket = null; // silence the onclose hook for deliberate closes
      socket.onclose = null;
      socket.close();
    }
  }
}

/** Websocket endpoint for the page we were served from. */
export function defaultUrl(location: { protocol: string; host: string }): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}
