// Client-side session state. Applies server events in arrival order and
// exposes exactly what the UI renders: per-dot states, counters, and the
// final metrics record.

import type {
  GameEventMessage,
  MetricsRecord,
  ModelPayload,
  ServerMessage,
} from "./protocol.js";
import { isGameEvent } from "./protocol.js";

export type DotState = "pending" | "hit";

export interface MistakeFlash {
  dot: number;
  at: number; // event timestamp, seconds
}

export class TracingGame {
  readonly sessionId: string;
  readonly model: ModelPayload;
  readonly states: DotState[];
  hits = 0;
  mistakes = 0;
  complete = false;
  record: MetricsRecord | null = null;
  flashes: MistakeFlash[] = [];

  constructor(sessionId: string, model: ModelPayload) {
    this.sessionId = sessionId;
    this.model = model;
    this.states = model.dots.map(() => "pending");
  }

  get total(): number {
    return this.model.dots.length;
  }

  get allGreen(): boolean {
    return this.states.every((s) => s === "hit");
  }

  /** Lowest-index pending dot, the one tracing should target next. */
  get nextDot(): number {
    return this.states.findIndex((s) => s === "pending");
  }

  apply(msg: ServerMessage): void {
    if (msg.kind === "metrics" && msg.session_id === this.sessionId) {
      this.record = msg.record;
      return;
    }
    if (!isGameEvent(msg) || msg.session_id !== this.sessionId) return;
    const event = msg as GameEventMessage;
    this.hits = event.hits;
    switch (event.kind) {
      case "dot_hit":
        if (event.dot !== undefined) this.states[event.dot] = "hit";
        break;
      case "mistake":
        this.mistakes += 1;
        if (event.dot !== undefined) {
          this.flashes.push({ dot: event.dot, at: event.t });
        }
        break;
      case "all_dots_complete":
        this.complete = true;
        break;
    }
  }

  /** Flashes younger than ttl seconds relative to `now`. */
  activeFlashes(now: number, ttl = 0.6): MistakeFlash[] {
    this.flashes = this.flashes.filter((f) => now - f.at < ttl);
    return this.flashes;
  }
}

// The metrics panel renders exactly these lines; tests compare them
// against a record fetched straight from the service.
export function formatMetrics(record: MetricsRecord): string[] {
  return [
    `participant ${record.participant_id}`,
    `${record.orientation} / ${record.configuration}, ${record.dot_count} dots`,
    `completion time ${record.tct_raw.toFixed(2)} s` +
      ` (${(record.norm_tct * 1000).toFixed(1)} ms/dot)`,
    `mistakes ${record.mistakes}` +
      ` (${record.norm_mistakes.toFixed(4)} per s)`,
    `resistance change ${record.mean_resistance_pct.toFixed(3)} %` +
      ` (${record.norm_resistance.toFixed(4)} %/s)`,
  ];
}
