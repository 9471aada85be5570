// Wire contract for the tracing session service. One socket drives one
// live session; every message is a JSON object with a "kind" field.

export type Configuration = "flat" | "curved";
export type Orientation = "vertical" | "horizontal";

export type Vec3 = [number, number, number];

export interface ModelPayload {
  configuration: Configuration;
  orientation: Orientation;
  hit_radius: number;
  dots: Vec3[];
}

export interface MetricsRecord {
  participant_id: string;
  orientation: Orientation;
  configuration: Configuration;
  dot_count: number;
  tct_raw: number;
  norm_tct: number;
  mistakes: number;
  norm_mistakes: number;
  mean_resistance_pct: number;
  norm_resistance: number;
}

// client -> server

export interface CreateSessionMessage {
  kind: "create_session";
  participant_id: string;
  configuration: Configuration;
  orientation: Orientation;
}

export interface SampleMessage {
  kind: "sample";
  t: number;
  position: Vec3;
}

export interface FetchMetricsMessage {
  kind: "fetch_metrics";
  session_id: string;
}

export interface FetchModelMessage {
  kind: "fetch_model";
  configuration: Configuration;
  orientation: Orientation;
}

export type ClientMessage =
  | CreateSessionMessage
  | SampleMessage
  | FetchMetricsMessage
  | FetchModelMessage;

// server -> client

export interface SessionCreatedMessage {
  kind: "session_created";
  session_id: string;
  model: ModelPayload;
}

export type GameEventKind = "dot_hit" | "mistake" | "all_dots_complete";

export interface GameEventMessage {
  kind: GameEventKind;
  session_id: string;
  t: number;
  hits: number;
  total: number;
  dot?: number;
}

export interface MetricsMessage {
  kind: "metrics";
  session_id: string;
  record: MetricsRecord;
}

export interface ModelMessage {
  kind: "model";
  model: ModelPayload;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type ServerMessage =
  | SessionCreatedMessage
  | GameEventMessage
  | MetricsMessage
  | ModelMessage
  | ErrorMessage;

const GAME_EVENT_KINDS: ReadonlySet<string> = new Set([
  "dot_hit",
  "mistake",
  "all_dots_complete",
]);

export function isGameEvent(msg: ServerMessage): msg is GameEventMessage {
  return GAME_EVENT_KINDS.has(msg.kind);
}

export function parseServerMessage(data: string): ServerMessage {
  const msg = JSON.parse(data) as { kind?: unknown };
  if (typeof msg !== "object" || msg === null || typeof msg.kind !== "string") {
    throw new Error(`not a protocol message: ${data}`);
  }
  return msg as ServerMessage;
}
