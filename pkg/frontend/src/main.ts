// Console entry point: wires the sliders, preview canvas, and timings strip
// to the tuning service socket.

import { clampField, kernelBandLabel, toWireUpdate, UpdateThrottle,
         GainTriple } from "./controls.js";
import { parseFrameMessage, parseServerMessage, pauseMessage, resumeMessage,
         selectBackgroundMessage, setParamsMessage } from "./protocol.js";
import { RANGES } from "./ranges.gen.js";
import { formatMs, stageSegments } from "./timings.js";
import { FrameGate, isSettling } from "./viewer.js";

const SLIDER_ORDER = [
  "depth_m", "rolloff_m", "kernel_slider", "exposure_gain", "gamma",
  "gain_r", "gain_g", "gain_b", "invalid_depth_alpha",
];

const DEFAULTS: Record<string, number> = {
  depth_m: 1.5, rolloff_m: 0, kernel_slider: 0, exposure_gain: 1, gamma: 1,
  gain_r: 1, gain_g: 1, gain_b: 1, invalid_depth_alpha: 0,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("preview");
const ctx = canvas.getContext("2d")!;
const statusEl = el<HTMLSpanElement>("status");
const settlingEl = el<HTMLSpanElement>("settling");
const bandEl = el<HTMLSpanElement>("kernel-band");
const frameEl = el<HTMLSpanElement>("frame-index");
const totalEl = el<HTMLSpanElement>("total-ms");
const stripEl = el<HTMLDivElement>("timings-strip");
const errorEl = el<HTMLDivElement>("error-badge");
const slidersEl = el<HTMLDivElement>("sliders");
const targetToggle = el<HTMLInputElement>("adjust-target");
const prefilterSel = el<HTMLSelectElement>("prefilter-kind");
const backgroundSel = el<HTMLSelectElement>("background");
const pauseBtn = el<HTMLButtonElement>("pause");

const gate = new FrameGate<Blob>();
let displayedHash: number | null = null;
let lastAckHash: number | null = null;
let paused = false;
let socket: WebSocket | null = null;

const throttle = new UpdateThrottle((update) => {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(setParamsMessage(update));
  }
});

const gains: GainTriple = { gain_r: 1, gain_g: 1, gain_b: 1 };

function buildSliders(): void {
  for (const field of SLIDER_ORDER) {
    const range = RANGES[field];
    const row = document.createElement("label");
    row.className = "slider-row";
    const name = document.createElement("span");
    name.textContent = range.label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(range.min);
    input.max = String(range.max);
    input.step = String(range.step);
    input.value = String(DEFAULTS[field] ?? range.min);
    const value = document.createElement("span");
    value.className = "slider-value";
    value.textContent = input.value;
    input.addEventListener("input", () => {
      const clamped = clampField(field, Number(input.value));
      value.textContent = clamped.toFixed(2);
      if (field.startsWith("gain_")) {
        gains[field as keyof GainTriple] = clamped;
      }
      throttle.push(toWireUpdate(field, clamped, gains));
    });
    row.append(name, input, value);
    slidersEl.append(row);
  }
}

function renderStrip(segments: ReturnType<typeof stageSegments>): void {
  stripEl.replaceChildren();
  for (const seg of segments) {
    if (seg.ns <= 0) continue;
    const bar = document.createElement("div");
    bar.className = seg.over ? "stage over" : "stage";
    bar.style.width = `${Math.max(seg.fraction * 100, 0.5)}%`;
    bar.title = `${seg.stage}: ${formatMs(seg.ns)}`;
    stripEl.append(bar);
  }
}

async function drawLoop(): Promise<void> {
  const next = gate.take();
  if (next) {
    try {
      const bitmap = await createImageBitmap(next.payload);
      canvas.width = bitmap.width;
      canvas.height = bitmap.height;
      ctx.drawImage(bitmap, 0, 0);
      displayedHash = next.paramsHash;
      frameEl.textContent = String(next.frameIndex);
      errorEl.hidden = true;
    } catch {
      errorEl.hidden = false;
      errorEl.textContent = "frame decode failed";
    }
    settlingEl.hidden = !isSettling(displayedHash, lastAckHash);
  }
  requestAnimationFrame(() => void drawLoop());
}

function connect(): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  socket = new WebSocket(`${proto}://${location.host}/ws?format=png`);
  socket.binaryType = "arraybuffer";
  statusEl.textContent = "connecting";

  socket.onopen = () => {
    statusEl.textContent = "connected";
    statusEl.className = "ok";
  };
  socket.onclose = () => {
    statusEl.textContent = "disconnected";
    statusEl.className = "bad";
    setTimeout(connect, 1000);
  };
  socket.onmessage = (event: MessageEvent) => {
    if (event.data instanceof ArrayBuffer) {
      const frame = parseFrameMessage(event.data);
      gate.offer(frame.frameIndex, frame.paramsHash,
                 new Blob([frame.body], { type: "image/png" }));
      return;
    }
    const msg = parseServerMessage(String(event.data));
    if (!msg) return;
    if (msg.type === "params_ack") {
      lastAckHash = msg.hash;
      bandEl.textContent = kernelBandLabel(msg.kernel_band);
      settlingEl.hidden = !isSettling(displayedHash, lastAckHash);
      errorEl.hidden = true;
    } else if (msg.type === "timings") {
      renderStrip(stageSegments(msg));
      totalEl.textContent = formatMs(msg.total_ns);
      totalEl.className = msg.within_budget ? "ok" : "bad";
    } else {
      errorEl.hidden = false;
      errorEl.textContent = `rejected: ${(msg.fields ?? []).join(", ")}`;
    }
  };
}

async function loadBackgrounds(): Promise<void> {
  try {
    const res = await fetch("/backgrounds");
    const data = (await res.json()) as { backgrounds: string[] };
    backgroundSel.replaceChildren();
    for (const name of data.backgrounds) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      backgroundSel.append(opt);
    }
  } catch {
    // service without backgrounds still streams frames
  }
}

targetToggle.addEventListener("change", () => {
  throttle.push({ adjust_target: targetToggle.checked ? "bg" : "fg" });
});

prefilterSel.addEventListener("change", () => {
  throttle.push({ prefilter: { kind: prefilterSel.value } });
});

backgroundSel.addEventListener("change", () => {
  socket?.send(selectBackgroundMessage(backgroundSel.value));
});

pauseBtn.addEventListener("click", () => {
  paused = !paused;
  socket?.send(paused ? pauseMessage() : resumeMessage());
  pauseBtn.textContent = paused ? "Resume" : "Pause";
});

buildSliders();
void loadBackgrounds();
connect();
void drawLoop();
