// Browser entry point: canvas rendering, pointer capture, and the
// status/metrics panels. One active session per tab; samples stream in
// pointer order with a monotonic clock.

import { GameSounds } from "./audio.js";
import { SessionClient } from "./client.js";
import { TracingGame, formatMetrics } from "./game.js";
import { fitProjection, type Projection } from "./projection.js";
import type { Configuration, Orientation, ServerMessage } from "./protocol.js";
import { isGameEvent } from "./protocol.js";

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusLine = document.getElementById("status") as HTMLElement;
const metricsPanel = document.getElementById("metrics") as HTMLPreElement;
const startBtn = document.getElementById("start") as HTMLButtonElement;
const participantInput = document.getElementById("participant") as HTMLInputElement;
const configSelect = document.getElementById("configuration") as HTMLSelectElement;
const orientSelect = document.getElementById("orientation") as HTMLSelectElement;

const sounds = new GameSounds();

let client: SessionClient | null = null;
let game: TracingGame | null = null;
let projection: Projection | null = null;
let tracing = false;
let lastT = 0;
const strokes: [number, number][][] = [];

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function clock(): number {
  return performance.now() / 1000;
}

function serviceUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}

function handleServerMessage(msg: ServerMessage): void {
  if (!game) return;
  game.apply(msg);
  if (isGameEvent(msg)) {
    if (msg.kind === "dot_hit") sounds.hit();
    if (msg.kind === "mistake") sounds.mistake();
    if (msg.kind === "all_dots_complete") {
      sounds.complete();
      tracing = false;
      setStatus(`all ${game.total} dots traced, fetching metrics...`);
    } else {
      setStatus(`${msg.hits} / ${msg.total} dots` +
        (game.mistakes ? `, ${game.mistakes} mistakes` : ""));
    }
  }
  if (msg.kind === "metrics") {
    metricsPanel.textContent = formatMetrics(msg.record).join("\n");
    setStatus("session complete");
  }
}

async function startSession(): Promise<void> {
  startBtn.disabled = true;
  try {
    if (!client) {
      client = await SessionClient.connect(serviceUrl(), {
        onEvent: handleServerMessage,
        onMetricsPush: handleServerMessage,
        onError: (msg) => setStatus(`service: ${msg.message}`),
        onClose: () => {
          client = null;
          setStatus("connection closed");
        },
      });
    }
    const created = await client.createSession(
      participantInput.value.trim() || "anon",
      configSelect.value as Configuration,
      orientSelect.value as Orientation,
    );
    game = new TracingGame(created.session_id, created.model);
    projection = fitProjection(created.model, canvas.width, canvas.height);
    strokes.length = 0;
    lastT = 0;
    metricsPanel.textContent = "";
    setStatus(`session ${created.session_id}: trace the ${created.model.dots.length} dots in order`);
  } catch (err) {
    setStatus(String(err));
  } finally {
    startBtn.disabled = false;
  }
}

function sendPointer(px: number, py: number): void {
  if (!client || !game || !projection || game.complete) return;
  const t = clock();
  if (t <= lastT) return; // keep the stream strictly monotonic
  lastT = t;
  strokes[strokes.length - 1]?.push([px, py]);
  client.sendSample(t, projection.toWorld(px, py));
}

function pointerPos(event: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [
    ((event.clientX - rect.left) / rect.width) * canvas.width,
    ((event.clientY - rect.top) / rect.height) * canvas.height,
  ];
}

canvas.addEventListener("pointerdown", (event) => {
  if (!game || game.complete) return;
  tracing = true;
  canvas.setPointerCapture(event.pointerId);
  strokes.push([]);
  sendPointer(...pointerPos(event));
});

canvas.addEventListener("pointermove", (event) => {
  if (!tracing) return;
  sendPointer(...pointerPos(event));
});

const stopTracing = () => {
  tracing = false;
};
canvas.addEventListener("pointerup", stopTracing);
canvas.addEventListener("pointercancel", stopTracing);

startBtn.addEventListener("click", () => void startSession());

function render(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (game && projection) {
    const dotPx = Math.max(4, game.model.hit_radius * projection.scale);

    ctx.strokeStyle = "#8ab";
    ctx.lineWidth = 1.5;
    for (const stroke of strokes) {
      if (stroke.length < 2) continue;
      ctx.beginPath();
      ctx.moveTo(stroke[0][0], stroke[0][1]);
      for (const [x, y] of stroke.slice(1)) ctx.lineTo(x, y);
      ctx.stroke();
    }

    const flashed = new Set(
      game.activeFlashes(lastT).map((f) => f.dot),
    );
    const next = game.nextDot;
    game.model.dots.forEach((dot, i) => {
      const [x, y] = projection!.toCanvas(dot);
      ctx.beginPath();
      ctx.arc(x, y, dotPx, 0, 2 * Math.PI);
      ctx.fillStyle = game!.states[i] === "hit" ? "#2a4" : "#ccc";
      ctx.fill();
      if (flashed.has(i)) {
        ctx.strokeStyle = "#d33";
        ctx.lineWidth = 3;
        ctx.stroke();
      } else if (i === next) {
        ctx.strokeStyle = "#333";
        ctx.lineWidth = 2;
        ctx.stroke();
      }
    });
  }
  requestAnimationFrame(render);
}

setStatus("choose a model and press start");
requestAnimationFrame(render);
