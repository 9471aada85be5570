// Drives the real session service over its wire protocol: a scripted
// pointer path traced through the same projection the UI uses.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { SessionClient, type WebSocketLike } from "../src/client.js";
import { TracingGame, formatMetrics } from "../src/game.js";
import { fitProjection } from "../src/projection.js";
import type { ServerMessage } from "../src/protocol.js";

const PORT = 8900 + (process.pid % 500);
const URL = `ws://127.0.0.1:${PORT}/ws`;
const wsFactory = (url: string) => new WebSocket(url) as unknown as WebSocketLike;

let server: ChildProcess;
let serverLog = "";

async function waitForService(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const up = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(URL);
      probe.on("open", () => {
        probe.close();
        resolve(true);
      });
      probe.on("error", () => resolve(false));
    });
    if (up) return;
    if (Date.now() > deadline) {
      throw new Error(`service did not come up on ${URL}\n${serverLog}`);
    }
    await new Promise((r) => setTimeout(r, 200));
  }
}

async function waitFor(cond: () => boolean, what: string, timeoutMs = 10000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!cond()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 10));
  }
}

beforeAll(async () => {
  server = spawn("python3", [
    "-m", "dottrace.cli", "serve", "--listen", `127.0.0.1:${PORT}`,
  ]);
  server.stderr?.on("data", (chunk) => {
    serverLog += String(chunk);
  });
  server.stdout?.on("data", (chunk) => {
    serverLog += String(chunk);
  });
  await waitForService();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

interface Run {
  client: SessionClient;
  game: TracingGame;
  events: ServerMessage[];
}

async function openSession(): Promise<Run> {
  const events: ServerMessage[] = [];
  let game: TracingGame | undefined;
  const client = await SessionClient.connect(
    URL,
    {
      onEvent: (msg) => {
        events.push(msg);
        game?.apply(msg);
      },
      onMetricsPush: (msg) => {
        events.push(msg);
        game?.apply(msg);
      },
    },
    wsFactory,
  );
  const created = await client.createSession("E2E", "flat", "vertical");
  game = new TracingGame(created.session_id, created.model);
  return { client, game, events };
}

describe("tracing against the live service", () => {
  it("scripted ordered path: all green, completion, metrics match the service", async () => {
    const { client, game, events } = await openSession();
    expect(game.model.dots.length).toBe(69);

    const proj = fitProjection(game.model, 640, 480);
    game.model.dots.forEach((dot, i) => {
      // the UI sends toWorld of the pointer pixel; aim at the dot's pixel
      const [px, py] = proj.toCanvas(dot);
      client.sendSample(i + 1, proj.toWorld(px, py));
    });

    await waitFor(() => game.complete && game.record !== null,
      "completion and the metrics push");

    expect(game.allGreen).toBe(true);
    expect(game.mistakes).toBe(0);
    expect(events.some((m) => m.kind === "all_dots_complete")).toBe(true);

    const record = game.record!;
    expect(record.dot_count).toBe(69);
    expect(record.mistakes).toBe(0);
    expect(record.tct_raw).toBe(68);

    // what the panel displays is exactly what fetch_metrics returns
    const fetched = await client.fetchMetrics(game.sessionId);
    expect(record).toEqual(fetched.record);
    expect(formatMetrics(record)).toEqual(formatMetrics(fetched.record));
    client.close();
  });

  it("an out-of-order click registers exactly one mistake", async () => {
    const { client, game } = await openSession();
    const proj = fitProjection(game.model, 640, 480);
    const aim = (i: number) => {
      const [px, py] = proj.toCanvas(game.model.dots[i]);
      return proj.toWorld(px, py);
    };

    client.sendSample(1, aim(1)); // skips dot 0
    await waitFor(() => game.mistakes === 1, "the mistake event");
    expect(game.states[1]).toBe("hit");

    client.sendSample(2, aim(0)); // back on track, not a mistake
    for (let i = 2; i < game.model.dots.length; i++) {
      client.sendSample(i + 1, aim(i));
    }
    await waitFor(() => game.complete && game.record !== null, "completion");

    expect(game.allGreen).toBe(true);
    expect(game.mistakes).toBe(1);
    expect(game.record!.mistakes).toBe(1);
    client.close();
  });
});
