import type { KeyRect, ServerFrame } from "./protocol.js";
import type { KeyboardRenderer, TrailPoint } from "./keyboard.js";
import { WpmTracker } from "./metrics.js";

// What the app needs from the websocket client; ServiceClient satisfies it.
export interface ClientPort {
  connect(): void;
  sendPinchDown(xMm: number, yMm: number): number;
  sendGaze(xMm: number, yMm: number): number | null;
  sendPinchUp(xMm: number, yMm: number): number;
  sendSelect(index: number): void;
  sendDelete(): void;
  sendPeekEnter(): void;
}

export interface AppState {
  text: string;
  candidates: string[];
  trail: TrailPoint[];
  currentKey: KeyRect | null;
  peekText: string | null;
  banner: string | null;
  holding: boolean;
}

export interface AppOptions {
  schedule?: (fn: () => void, ms: number) => void;
  reconnectDelayMs?: number;
}

// Pointer-as-gaze, hold-as-pinch state machine. All text shown comes from
// server frames; the app never edits its own copy of the transcription.
export class SwipeApp {
  client: ClientPort | null = null;
  readonly state: AppState = {
    text: "",
    candidates: [],
    trail: [],
    currentKey: null,
    peekText: null,
    banner: null,
    holding: false,
  };
  readonly wpm = new WpmTracker();

  private hoveredDelete = false;
  // set between pinch_up and its reply; a plain text reply means the swipe
  // was cancelled (released over delete), so the stale strip is dropped
  private awaitingOutcome = false;
  private schedule: (fn: () => void, ms: number) => void;
  private reconnectDelayMs: number;

  constructor(
    private renderer: KeyboardRenderer,
    opts: AppOptions = {},
  ) {
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 500;
  }

  pointerDown(xPx: number, yPx: number): void {
    if (this.client === null) return;
    const hit = this.renderer.candidateIndexAt(xPx, yPx);
    if (hit !== null) {
      this.client.sendSelect(hit);
      return;
    }
    const mm = this.renderer.transform.pxToMm(xPx, yPx);
    const key = this.renderer.keyAt(mm.x_mm, mm.y_mm);
    if (key !== null && key.label === "delete") {
      this.state.candidates = []; // delete closes the swap window server-side
      this.client.sendDelete();
      return;
    }
    this.state.holding = true;
    this.state.trail = [{ x_mm: mm.x_mm, y_mm: mm.y_mm }];
    this.state.candidates = [];
    this.wpm.noteTimestamp(this.client.sendPinchDown(mm.x_mm, mm.y_mm));
  }

  pointerMove(xPx: number, yPx: number): void {
    if (this.client === null) return;
    const mm = this.renderer.transform.pxToMm(xPx, yPx);
    const key = this.renderer.keyAt(mm.x_mm, mm.y_mm);
    this.state.currentKey = key;
    const overDelete = key !== null && key.label === "delete";
    if (overDelete && !this.hoveredDelete) {
      this.client.sendPeekEnter();
    } else if (!overDelete) {
      this.state.peekText = null;
    }
    this.hoveredDelete = overDelete;
    if (this.state.holding) {
      this.state.trail.push({ x_mm: mm.x_mm, y_mm: mm.y_mm });
      const t = this.client.sendGaze(mm.x_mm, mm.y_mm);
      if (t !== null) this.wpm.noteTimestamp(t);
    }
  }

  pointerUp(xPx: number, yPx: number): void {
    if (this.client === null || !this.state.holding) return;
    this.state.holding = false;
    const mm = this.renderer.transform.pxToMm(xPx, yPx);
    this.wpm.noteTimestamp(this.client.sendPinchUp(mm.x_mm, mm.y_mm));
    this.state.trail = [];
    this.awaitingOutcome = true;
  }

  onFrame(frame: ServerFrame): void {
    if (frame.type !== "error") this.state.banner = null;
    switch (frame.type) {
      case "text":
        this.state.text = frame.text;
        if (this.awaitingOutcome) {
          this.state.candidates = [];
          this.awaitingOutcome = false;
        }
        break;
      case "candidates":
        this.state.candidates = frame.words;
        break;
      case "commit":
        this.state.text = frame.text;
        this.state.candidates = frame.words;
        this.awaitingOutcome = false;
        this.wpm.noteCommit(frame.text);
        break;
      case "peek":
        this.state.peekText = frame.text;
        break;
      case "error":
        this.state.banner = `service error: ${frame.reason}`;
        break;
      case "layout":
        break; // layout comes over HTTP; nothing to update here
    }
  }

  onOpen(): void {
    this.state.banner = null;
  }

  onDrop(): void {
    this.state.banner = "connection lost — reconnecting…";
    this.state.holding = false;
    this.state.trail = [];
    this.state.candidates = [];
    this.state.peekText = null;
    this.state.text = "";
    this.awaitingOutcome = false;
    this.wpm.reset();
    this.schedule(() => this.client?.connect(), this.reconnectDelayMs);
  }

  draw(): void {
    this.renderer.draw({
      trail: this.state.trail,
      candidates: this.state.candidates,
      currentKey: this.state.currentKey,
      holding: this.state.holding,
    });
  }
}

// Map mouse events on the canvas to app pointer calls (canvas-local pixels).
export function wireCanvas(canvas: HTMLCanvasElement, app: SwipeApp): void {
  const local = (ev: MouseEvent): { x: number; y: number } => {
    const r = canvas.getBoundingClientRect();
    return { x: ev.clientX - r.left, y: ev.clientY - r.top };
  };
  canvas.addEventListener("mousedown", (ev) => {
    const p = local(ev);
    app.pointerDown(p.x, p.y);
  });
  canvas.addEventListener("mousemove", (ev) => {
    const p = local(ev);
    app.pointerMove(p.x, p.y);
  });
  canvas.addEventListener("mouseup", (ev) => {
    const p = local(ev);
    app.pointerUp(p.x, p.y);
  });
}
