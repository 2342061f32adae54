import type { ClientFrame, ServerFrame } from "./protocol.js";
import { parseServerFrame } from "./protocol.js";

// Property-handler subset shared by the browser WebSocket and the `ws`
// package, so tests and the node e2e harness can inject either (or a fake).
// Handler params are `any` so both DOM lib and @types/ws event types fit.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHandlers {
  onFrame(frame: ServerFrame): void;
  onOpen?(): void;
  onDrop?(): void;
}

const GAZE_MIN_GAP_S = 0.005; // 200 Hz cap on streamed gaze frames

export class ServiceClient {
  private socket: SocketLike | null = null;
  private seq = 0;
  private lastGazeT = -Infinity;
  private lastStampT = -Infinity;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private handlers: ClientHandlers,
    private now: () => number = () => performance.now() / 1000,
  ) {}

  connect(): void {
    const sock = this.factory(this.url);
    this.socket = sock;
    sock.onopen = () => this.handlers.onOpen?.();
    sock.onmessage = (ev) => this.handlers.onFrame(parseServerFrame(String(ev.data)));
    sock.onclose = () => {
      if (this.socket === sock) {
        this.socket = null;
        this.handlers.onDrop?.();
      }
    };
    sock.onerror = () => {};
  }

  close(): void {
    const sock = this.socket;
    this.socket = null; // suppress onDrop for deliberate closes
    sock?.close();
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  // Timestamps must be strictly increasing for the velocity filter downstream;
  // nudge forward when the clock is coarser than the event rate.
  private stamp(): number {
    const t = Math.max(this.now(), this.lastStampT + 1e-4);
    this.lastStampT = t;
    return t;
  }

  private send(frame: ClientFrame): void {
    if (this.socket === null) throw new Error("socket not connected");
    this.socket.send(JSON.stringify(frame));
  }

  sendPinchDown(xMm: number, yMm: number): number {
    const t = this.stamp();
    this.send({ seq: this.seq++, type: "pinch_down", x_mm: xMm, y_mm: yMm, t_s: t });
    this.lastGazeT = t;
    return t;
  }

  // Returns the timestamp used, or null when the frame was throttled away.
  sendGaze(xMm: number, yMm: number): number | null {
    if (this.now() - this.lastGazeT < GAZE_MIN_GAP_S) return null;
    const t = this.stamp();
    this.send({ seq: this.seq++, type: "gaze", x_mm: xMm, y_mm: yMm, t_s: t });
    this.lastGazeT = t;
    return t;
  }

  sendPinchUp(xMm: number, yMm: number): number {
    const t = this.stamp();
    this.send({ seq: this.seq++, type: "pinch_up", x_mm: xMm, y_mm: yMm, t_s: t });
    return t;
  }

  sendSelect(index: number): void {
    this.send({ seq: this.seq++, type: "select", index });
  }

  sendDelete(): void {
    this.send({ seq: this.seq++, type: "delete" });
  }

  sendPeekEnter(): void {
    this.send({ seq: this.seq++, type: "peek_enter" });
  }

  sendTrial(presented: string): void {
    this.send({ seq: this.seq++, type: "trial", presented });
  }

  requestLayout(): void {
    this.send({ seq: this.seq++, type: "layout" });
  }
}
