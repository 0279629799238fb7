// Latest-frame slot decoupling message arrival from the render loop.
// The displayed frame index is monotonic: frames older than what is on
// screen (or already queued) are discarded.

export interface PendingFrame<T> {
  frameIndex: number;
  paramsHash: number;
  payload: T;
}

export class FrameGate<T> {
  private displayedIndex = -1;
  private pending: PendingFrame<T> | null = null;

  /** Returns false when the frame is stale and was dropped. */
  offer(frameIndex: number, paramsHash: number, payload: T): boolean {
    if (frameIndex <= this.displayedIndex) return false;
    if (this.pending && frameIndex <= this.pending.frameIndex) return false;
    this.pending = { frameIndex, paramsHash, payload };
    return true;
  }

  /** Consume the newest undisplayed frame, advancing the monotonic cursor. */
  take(): PendingFrame<T> | null {
    if (!this.pending) return null;
    const next = this.pending;
    this.pending = null;
    this.displayedIndex = next.frameIndex;
    return next;
  }

  get displayed(): number {
    return this.displayedIndex;
  }
}

/** "Settling" means pixels on screen were rendered under an older params
 * snapshot than the last acknowledged one. */
export function isSettling(displayedHash: number | null,
                           lastAckHash: number | null): boolean {
  if (displayedHash === null || lastAckHash === null) return false;
  return displayedHash !== lastAckHash;
}
