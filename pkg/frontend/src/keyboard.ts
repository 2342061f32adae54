import type { KeyRect, Layout } from "./protocol.js";
import { ViewTransform } from "./transform.js";

// Minimal slice of CanvasRenderingContext2D the renderer needs. Tests inject
// a recording stub (jsdom canvases return null from getContext), the browser
// passes the real context; both satisfy this structurally.
export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
}

export interface TrailPoint {
  x_mm: number;
  y_mm: number;
}

export interface RenderState {
  trail: TrailPoint[];
  candidates: string[];
  // key the pointer is currently over; the candidate strip is anchored to it
  currentKey: KeyRect | null;
  holding: boolean;
}

export interface PxBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

const KEY_FILL = "#1c2733";
const KEY_FILL_ACTIVE = "#2e4b6b";
const KEY_STROKE = "#3c4a5a";
const KEY_TEXT = "#dce3ea";
const TRAIL_STROKE = "#6fb3ff";
const STRIP_FILL = "#0f1620";
const STRIP_TEXT = "#ffd479";

export class KeyboardRenderer {
  readonly transform: ViewTransform;
  private stripBoxes: PxBox[] = [];

  constructor(
    private ctx: Draw2D,
    private layout: Layout,
    private widthPx: number,
    private heightPx: number,
  ) {
    this.transform = new ViewTransform(layout, widthPx, heightPx);
  }

  keyAt(xMm: number, yMm: number): KeyRect | null {
    for (const k of this.layout.keys) {
      if (
        Math.abs(xMm - k.cx_mm) <= k.w_mm / 2 &&
        Math.abs(yMm - k.cy_mm) <= k.h_mm / 2
      ) {
        return k;
      }
    }
    return null;
  }

  // Candidate boxes as drawn by the last draw() call, in canvas pixels.
  get strip(): readonly PxBox[] {
    return this.stripBoxes;
  }

  // Hit test against the candidate boxes drawn by the last draw() call.
  candidateIndexAt(xPx: number, yPx: number): number | null {
    for (let i = 0; i < this.stripBoxes.length; i++) {
      const b = this.stripBoxes[i]!;
      if (xPx >= b.x && xPx <= b.x + b.w && yPx >= b.y && yPx <= b.y + b.h) {
        return i;
      }
    }
    return null;
  }

  draw(state: RenderState): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.widthPx, this.heightPx);

    const keyFont = Math.round(9 * this.transform.scale);
    ctx.lineWidth = 1;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.font = `${keyFont}px sans-serif`;
    for (const k of this.layout.keys) {
      const tl = this.transform.mmToPx(k.cx_mm - k.w_mm / 2, k.cy_mm - k.h_mm / 2);
      const w = k.w_mm * this.transform.scale;
      const h = k.h_mm * this.transform.scale;
      const active = state.currentKey !== null && state.currentKey.label === k.label;
      ctx.fillStyle = active ? KEY_FILL_ACTIVE : KEY_FILL;
      ctx.fillRect(tl.x + 1, tl.y + 1, w - 2, h - 2);
      ctx.strokeStyle = KEY_STROKE;
      ctx.strokeRect(tl.x + 1, tl.y + 1, w - 2, h - 2);
      ctx.fillStyle = KEY_TEXT;
      const c = this.transform.mmToPx(k.cx_mm, k.cy_mm);
      ctx.fillText(k.label === "space" ? "␣" : k.label === "delete" ? "⌫" : k.label, c.x, c.y);
    }

    if (state.trail.length >= 2) {
      ctx.strokeStyle = TRAIL_STROKE;
      ctx.lineWidth = 3;
      ctx.beginPath();
      const first = this.transform.mmToPx(state.trail[0]!.x_mm, state.trail[0]!.y_mm);
      ctx.moveTo(first.x, first.y);
      for (const p of state.trail.slice(1)) {
        const q = this.transform.mmToPx(p.x_mm, p.y_mm);
        ctx.lineTo(q.x, q.y);
      }
      ctx.stroke();
    }

    this.stripBoxes = [];
    if (state.candidates.length > 0) {
      const anchor = state.currentKey ?? this.layout.keys[0]!;
      const anchorPx = this.transform.mmToPx(anchor.cx_mm, anchor.cy_mm - anchor.h_mm);
      const boxH = Math.max(18, Math.round(10 * this.transform.scale));
      const pad = 6;
      ctx.font = `${Math.round(boxH * 0.55)}px sans-serif`;
      // measureText is not in Draw2D; size boxes from word length instead
      const widths = state.candidates.map((w) => Math.max(2, w.length) * boxH * 0.45 + 2 * pad);
      const total = widths.reduce((a, b) => a + b, 0) + pad * (state.candidates.length - 1);
      let x = Math.min(Math.max(anchorPx.x - total / 2, 4), this.widthPx - total - 4);
      const y = Math.max(anchorPx.y - boxH, 4);
      for (let i = 0; i < state.candidates.length; i++) {
        const box = { x, y, w: widths[i]!, h: boxH };
        this.stripBoxes.push(box);
        ctx.fillStyle = STRIP_FILL;
        ctx.fillRect(box.x, box.y, box.w, box.h);
        ctx.strokeStyle = KEY_STROKE;
        ctx.strokeRect(box.x, box.y, box.w, box.h);
        ctx.fillStyle = STRIP_TEXT;
        ctx.fillText(state.candidates[i]!, box.x + box.w / 2, box.y + box.h / 2);
        x += widths[i]! + pad;
      }
    }
  }
}
