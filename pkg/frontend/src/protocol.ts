// Wire protocol between the console and the tuning service.
//
// Binary frames: 8-byte header (uint32 LE frame index, uint32 LE params
// hash) followed by the encoded composite. Text messages are JSON with a
// "type" discriminator.

export interface FrameMessage {
  frameIndex: number;
  paramsHash: number;
  body: Uint8Array<ArrayBuffer>;
}

export interface TimingsMessage {
  type: "timings";
  frame: number;
  ingest_ns: number;
  align_ns: number;
  prefilter_ns: number;
  matte_ns: number;
  close_ns: number;
  composite_ns: number;
  encode_ns: number;
  total_ns: number;
  within_budget: boolean;
}

export interface ParamsAckMessage {
  type: "params_ack";
  hash: number;
  params: Record<string, unknown>;
  kernel_band: number;
}

export interface ErrorMessage {
  type: "error";
  fields: string[];
  message?: string;
}

export type ServerMessage = TimingsMessage | ParamsAckMessage | ErrorMessage;

export const HEADER_BYTES = 8;

export function parseFrameMessage(data: ArrayBuffer): FrameMessage {
  if (data.byteLength < HEADER_BYTES) {
    throw new Error(`frame message too short: ${data.byteLength} bytes`);
  }
  const view = new DataView(data);
  return {
    frameIndex: view.getUint32(0, true),
    paramsHash: view.getUint32(4, true),
    body: new Uint8Array(data, HEADER_BYTES),
  };
}

export function parseServerMessage(text: string): ServerMessage | null {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof payload !== "object" || payload === null) return null;
  const type = (payload as { type?: unknown }).type;
  if (type === "timings" || type === "params_ack" || type === "error") {
    return payload as ServerMessage;
  }
  return null;
}

export function setParamsMessage(partial: Record<string, unknown>): string {
  return JSON.stringify({ type: "set_params", params: partial });
}

export function selectBackgroundMessage(name: string): string {
  return JSON.stringify({ type: "select_background", name });
}

export function pauseMessage(): string {
  return JSON.stringify({ type: "pause" });
}

export function resumeMessage(): string {
  return JSON.stringify({ type: "resume" });
}
