// Slider-side logic: range clamping that mirrors the server's validation,
// and a rate limiter so slider drags send at most ~30 partial updates per
// second while never dropping the final position.

import { RANGES } from "./ranges.gen.js";

// gain sliders map onto one server-side triple
const GAIN_FIELDS = ["gain_r", "gain_g", "gain_b"] as const;

export function clampField(field: string, value: number): number {
  const range = RANGES[field];
  if (!range) throw new Error(`unknown slider field ${field}`);
  if (Number.isNaN(value)) return range.min;
  return Math.min(Math.max(value, range.min), range.max);
}

export interface GainTriple {
  gain_r: number;
  gain_g: number;
  gain_b: number;
}

/** Fold slider-level fields into a wire-level partial params update. */
export function toWireUpdate(field: string, value: number,
                             gains: GainTriple): Record<string, unknown> {
  const clamped = clampField(field, value);
  if ((GAIN_FIELDS as readonly string[]).includes(field)) {
    const next = { ...gains, [field]: clamped };
    return { gain_rgb: [next.gain_r, next.gain_g, next.gain_b] };
  }
  return { [field]: clamped };
}

export const MIN_SEND_INTERVAL_MS = 1000 / 30;

type Clock = () => number;
type Scheduler = (fn: () => void, ms: number) => void;

/**
 * Coalesces partial updates and forwards them at most once per interval.
 * A trailing flush guarantees the last slider position always ships.
 */
export class UpdateThrottle {
  private pending: Record<string, unknown> = {};
  private lastSend = -Infinity;
  private timerArmed = false;

  constructor(private readonly send: (update: Record<string, unknown>) => void,
              private readonly intervalMs: number = MIN_SEND_INTERVAL_MS,
              private readonly now: Clock = () => performance.now(),
              private readonly schedule: Scheduler = (fn, ms) => {
                setTimeout(fn, ms);
              }) {}

  push(update: Record<string, unknown>): void {
    Object.assign(this.pending, update);
    const elapsed = this.now() - this.lastSend;
    if (elapsed >= this.intervalMs) {
      this.flush();
    } else if (!this.timerArmed) {
      this.timerArmed = true;
      this.schedule(() => {
        this.timerArmed = false;
        if (Object.keys(this.pending).length) this.flush();
      }, this.intervalMs - elapsed);
    }
  }

  flush(): void {
    if (!Object.keys(this.pending).length) return;
    this.send(this.pending);
    this.pending = {};
    this.lastSend = this.now();
  }
}

export function kernelBandLabel(band: number): string {
  return band === 0 ? "off" : `${band}×${band}`;
}
