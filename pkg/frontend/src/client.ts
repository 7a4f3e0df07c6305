// Session client: one websocket, client-side sequence numbers, typed
// message dispatch, and reconnect-with-reset on disconnect.
//
// The constructor takes the WebSocket implementation so tests can inject
// the "ws" package under node; the browser passes the native one.

import { MessageFactory, parseServiceMessage, ServiceMessage } from "./protocol.js";

export interface WsLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close", handler: () => void): void;
  addEventListener(type: "message", handler: (ev: { data: unknown }) => void): void;
}

export type WsCtor = new (url: string) => WsLike;

export interface SessionClientHandlers {
  onMessage: (msg: ServiceMessage) => void;
  onOpen?: () => void;
  onDisconnect?: () => void;
}

export class SessionClient {
  private ws: WsLike | null = null;
  private factory = new MessageFactory();
  private closedByUs = false;

  constructor(
    private url: string,
    private handlers: SessionClientHandlers,
    private WebSocketImpl: WsCtor,
    private reconnectDelayMs = 1000,
  ) {}

  connect(): void {
    this.closedByUs = false;
    const ws = new this.WebSocketImpl(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => {
      // a fresh connection is a fresh session: restart our numbering too
      this.factory = new MessageFactory();
      this.handlers.onOpen?.();
    });
    ws.addEventListener("message", (ev) => {
      const msg = parseServiceMessage(String(ev.data));
      if (msg) this.handlers.onMessage(msg);
    });
    ws.addEventListener("close", () => {
      if (this.closedByUs) return;
      this.handlers.onDisconnect?.();
      setTimeout(() => this.connect(), this.reconnectDelayMs);
    });
  }

  close(): void {
    this.closedByUs = true;
    this.ws?.close();
  }

  private send(payload: string): void {
    if (!this.ws) throw new Error("not connected");
    this.ws.send(payload);
  }

  sendUtterance(text: string): void {
    this.send(this.factory.utterance(text));
  }

  sendClick(x: number, z: number): void {
    this.send(this.factory.deixisClick(x, z));
  }

  sendHead(polarity: boolean): void {
    this.send(this.factory.headGesture(polarity));
  }

  sendShape(shapeId: string): void {
    this.send(this.factory.shapeGesture(shapeId));
  }

  sendMotion(motionId: string): void {
    this.send(this.factory.motionGesture(motionId));
  }

  sendLearn(shapeId: string): void {
    this.send(this.factory.learnGesture(shapeId));
  }

  sendReset(): void {
    this.send(this.factory.reset());
  }
}
