// Thin promise wrapper over the session socket. Requests resolve with
// their reply; spontaneous traffic (game events, the completion metrics
// push, sample-rejection errors) goes to callbacks. Runs on the browser
// WebSocket or any compatible implementation passed in (tests inject the
// "ws" package). Replies arrive in send order, so don't interleave
// requests with a sample burst that can error.

import type {
  ClientMessage,
  Configuration,
  ErrorMessage,
  MetricsMessage,
  ModelMessage,
  Orientation,
  ServerMessage,
  SessionCreatedMessage,
  Vec3,
} from "./protocol.js";
import { isGameEvent, parseServerMessage } from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close", handler: () => void): void;
  addEventListener(type: "message", handler: (event: { data: unknown }) => void): void;
  addEventListener(type: "error", handler: (event: unknown) => void): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface SessionClientHandlers {
  onEvent?: (msg: ServerMessage) => void;
  onMetricsPush?: (msg: MetricsMessage) => void;
  onError?: (msg: ErrorMessage) => void;
  onClose?: () => void;
}

interface Pending {
  expects: string;
  resolve: (msg: ServerMessage) => void;
  reject: (err: Error) => void;
}

export class ServiceError extends Error {}

export class SessionClient {
  private readonly ws: WebSocketLike;
  private readonly handlers: SessionClientHandlers;
  private readonly pending: Pending[] = [];

  private constructor(ws: WebSocketLike, handlers: SessionClientHandlers) {
    this.ws = ws;
    this.handlers = handlers;
    ws.addEventListener("message", (event) => {
      this.dispatch(parseServerMessage(String(event.data)));
    });
    ws.addEventListener("close", () => {
      for (const p of this.pending.splice(0)) {
        p.reject(new Error("connection closed"));
      }
      handlers.onClose?.();
    });
  }

  static connect(
    url: string,
    handlers: SessionClientHandlers = {},
    factory?: WebSocketFactory,
  ): Promise<SessionClient> {
    const make = factory ?? ((u: string) => new WebSocket(u) as WebSocketLike);
    return new Promise((resolve, reject) => {
      const ws = make(url);
      ws.addEventListener("open", () => resolve(new SessionClient(ws, handlers)));
      ws.addEventListener("error", () => reject(new Error(`cannot reach ${url}`)));
    });
  }

  private dispatch(msg: ServerMessage): void {
    if (isGameEvent(msg)) {
      this.handlers.onEvent?.(msg);
      return;
    }
    const head = this.pending[0];
    if (msg.kind === "error") {
      if (head) {
        this.pending.shift();
        head.reject(new ServiceError(msg.message));
      } else {
        this.handlers.onError?.(msg);
      }
      return;
    }
    if (head && head.expects === msg.kind) {
      this.pending.shift();
      head.resolve(msg);
      return;
    }
    if (msg.kind === "metrics") {
      // unsolicited: the completion push
      this.handlers.onMetricsPush?.(msg);
    }
  }

  private request<T extends ServerMessage>(
    msg: ClientMessage,
    expects: T["kind"],
  ): Promise<T> {
    return new Promise((resolve, reject) => {
      this.pending.push({
        expects,
        resolve: (reply) => resolve(reply as T),
        reject,
      });
      this.ws.send(JSON.stringify(msg));
    });
  }

  createSession(
    participantId: string,
    configuration: Configuration,
    orientation: Orientation,
  ): Promise<SessionCreatedMessage> {
    return this.request<SessionCreatedMessage>(
      {
        kind: "create_session",
        participant_id: participantId,
        configuration,
        orientation,
      },
      "session_created",
    );
  }

  /** Fire-and-forget; hits and mistakes come back as events. */
  sendSample(t: number, position: Vec3): void {
    this.ws.send(JSON.stringify({ kind: "sample", t, position }));
  }

  fetchMetrics(sessionId: string): Promise<MetricsMessage> {
    return this.request<MetricsMessage>(
      { kind: "fetch_metrics", session_id: sessionId },
      "metrics",
    );
  }

  fetchModel(
    configuration: Configuration,
    orientation: Orientation,
  ): Promise<ModelMessage> {
    return this.request<ModelMessage>(
      { kind: "fetch_model", configuration, orientation },
      "model",
    );
  }

  close(): void {
    this.ws.close();
  }
}
