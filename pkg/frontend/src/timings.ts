// Per-stage latency strip: stage widths are fractions of the 60 fps budget,
// and a stage turns red once the cumulative total crosses it.

import type { TimingsMessage } from "./protocol.js";

export const BUDGET_NS = 16_666_667;

export const STAGES = [
  "ingest", "align", "prefilter", "matte", "close", "composite", "encode",
] as const;

export interface StageSegment {
  stage: string;
  ns: number;
  fraction: number; // of the frame budget, capped at 1 for drawing
  over: boolean;    // cumulative time has exceeded the budget by this stage
}

export function stageSegments(t: TimingsMessage): StageSegment[] {
  let cumulative = 0;
  return STAGES.map((stage) => {
    const ns = t[`${stage}_ns` as keyof TimingsMessage] as number;
    cumulative += ns;
    return {
      stage,
      ns,
      fraction: Math.min(ns / BUDGET_NS, 1),
      over: cumulative > BUDGET_NS,
    };
  });
}

export function formatMs(ns: number): string {
  return `${(ns / 1e6).toFixed(2)} ms`;
}
