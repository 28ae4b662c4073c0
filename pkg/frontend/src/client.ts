// Websocket client for the engine gateway: dispatches snapshots and acks,
// tracks connection/staleness, reconnects with a fixed backoff.

import { isValidSnapshot, OperatorCommand, ServerMessage, StateSnapshot } from "./types";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ClientHandlers {
  onSnapshot?: (snapshot: StateSnapshot) => void;
  onAck?: (ok: boolean, reason: string | null) => void;
  onStatus?: (status: ConnectionStatus) => void;
  onInvalid?: (reason: string) => void;
}

interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  addEventListener(type: string, listener: (event: any) => void): void;
}

type WebSocketCtor = new (url: string) => WebSocketLike;

const STALE_AFTER_MS = 1000;
const RECONNECT_DELAY_MS = 1000;
const WS_OPEN = 1;

export class GatewayClient {
  private ws: WebSocketLike | null = null;
  private handlers: ClientHandlers;
  private url: string;
  private ctor: WebSocketCtor;
  private closed = false;
  private lastSnapshotAt = 0;
  status: ConnectionStatus = "disconnected";

  constructor(url: string, handlers: ClientHandlers = {}, ctor?: WebSocketCtor) {
    this.url = url;
    this.handlers = handlers;
    this.ctor = ctor ?? (WebSocket as unknown as WebSocketCtor);
  }

  connect(): void {
    this.closed = false;
    this.setStatus("connecting");
    const ws = new this.ctor(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => this.setStatus("connected"));
    ws.addEventListener("close", () => {
      this.setStatus("disconnected");
      if (!this.closed) {
        setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
      }
    });
    ws.addEventListener("error", () => {
      // close always follows; nothing to do here
    });
    ws.addEventListener("message", (event: MessageEvent) => {
      this.handleMessage(String(event.data));
    });
  }

  handleMessage(raw: string): void {
    let message: ServerMessage;
    try {
      message = JSON.parse(raw);
    } catch {
      this.handlers.onInvalid?.("unparseable message");
      return;
    }
    if (message.type === "snapshot") {
      if (!isValidSnapshot(message.data)) {
        // keep the last good frame; just surface the problem
        this.handlers.onInvalid?.("snapshot failed schema check");
        return;
      }
      this.lastSnapshotAt = Date.now();
      this.handlers.onSnapshot?.(message.data);
    } else if (message.type === "ack") {
      this.handlers.onAck?.(message.ok, message.reason);
    }
  }

  send(command: OperatorCommand): boolean {
    if (!this.ws || this.ws.readyState !== WS_OPEN) {
      return false;
    }
    this.ws.send(JSON.stringify(command));
    return true;
  }

  get connected(): boolean {
    return this.status === "connected";
  }

  isStale(now: number = Date.now()): boolean {
    return this.lastSnapshotAt === 0 || now - this.lastSnapshotAt > STALE_AFTER_MS;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.handlers.onStatus?.(status);
  }
}

export function gatewayUrl(location: Location): string {
  // host and token are overridable from the query string
  const params = new URLSearchParams(location.search);
  const host = params.get("host") ?? location.host;
  const token = params.get("token");
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${host}/ws${token ? `?token=${encodeURIComponent(token)}` : ""}`;
}
