// Live words-per-minute over the session window, mirroring the service-side
// replay metric: duration spans the timestamped frames (pinch/gaze), length
// is the committed text with surrounding whitespace trimmed, and words are
// normalized to five characters.

export function wpm(chars: number, seconds: number): number {
  if (seconds <= 0) throw new Error("duration must be positive");
  return chars / 5 / (seconds / 60);
}

export class WpmTracker {
  private firstT: number | null = null;
  private lastT: number | null = null;
  private value: number | null = null;

  // Call for every timestamped frame sent (pinch_down, gaze, pinch_up).
  noteTimestamp(tS: number): void {
    if (this.firstT === null) this.firstT = tS;
    this.lastT = tS;
  }

  // Call when a commit frame lands; recomputes over the window so far.
  noteCommit(text: string): void {
    if (this.firstT === null || this.lastT === null || this.lastT <= this.firstT) return;
    this.value = wpm(text.trim().length, this.lastT - this.firstT);
  }

  reset(): void {
    this.firstT = null;
    this.lastT = null;
    this.value = null;
  }

  current(): number | null {
    return this.value;
  }

  display(): string {
    return this.value === null ? "—" : this.value.toFixed(1);
  }
}
