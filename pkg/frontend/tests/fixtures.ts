import type { Draw2D } from "../src/keyboard.js";
import type { ClientPort } from "../src/app.js";
import type { KeyRect, Layout } from "../src/protocol.js";

// Desk-scale qwerty board in mm, same shape as the service layout: three
// letter rows plus a space/delete row.
export function makeLayout(): Layout {
  const rows = ["qwertyuiop", "asdfghjkl", "zxcvbnm"];
  const keyW = 18;
  const keyH = 18;
  const pitch = 19;
  const keys: KeyRect[] = [];
  rows.forEach((row, r) => {
    const x0 = 9 + r * (pitch / 2);
    for (let i = 0; i < row.length; i++) {
      keys.push({
        label: row[i]!,
        cx_mm: x0 + i * pitch,
        cy_mm: 9 + r * pitch,
        w_mm: keyW,
        h_mm: keyH,
      });
    }
  });
  const bottomY = 9 + 3 * pitch;
  keys.push({ label: "space", cx_mm: 76, cy_mm: bottomY, w_mm: 95, h_mm: keyH });
  keys.push({ label: "delete", cx_mm: 152, cy_mm: bottomY, w_mm: 37, h_mm: keyH });
  return { keys, viewing_distance_mm: 650 };
}

export function keyCenter(layout: Layout, label: string): { x: number; y: number } {
  const k = layout.keys.find((k) => k.label === label);
  if (!k) throw new Error(`no key ${label}`);
  return { x: k.cx_mm, y: k.cy_mm };
}

// Records the draw calls the renderer makes; enough to assert what got drawn
// without a real rasterizer (jsdom canvases have no 2d context).
export class RecordingCtx implements Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;
  font = "";
  textAlign: CanvasTextAlign = "left";
  textBaseline: CanvasTextBaseline = "alphabetic";

  texts: { text: string; x: number; y: number }[] = [];
  fillRects = 0;
  strokeRects = 0;
  strokes = 0;
  clears = 0;

  clearRect(): void {
    this.clears++;
    this.texts = [];
    this.fillRects = 0;
    this.strokeRects = 0;
    this.strokes = 0;
  }
  fillRect(): void {
    this.fillRects++;
  }
  strokeRect(): void {
    this.strokeRects++;
  }
  fillText(text: string, x: number, y: number): void {
    this.texts.push({ text, x, y });
  }
  beginPath(): void {}
  moveTo(): void {}
  lineTo(): void {}
  stroke(): void {
    this.strokes++;
  }
}

export interface SentFrame {
  type: string;
  x_mm?: number;
  y_mm?: number;
  t_s?: number;
  index?: number;
}

// Stand-in for ServiceClient: records what the app asked it to send and
// hands out advancing timestamps.
export class FakeClient implements ClientPort {
  frames: SentFrame[] = [];
  connects = 0;
  private t = 0;

  connect(): void {
    this.connects++;
  }
  private stamp(): number {
    this.t += 0.01;
    return this.t;
  }
  sendPinchDown(xMm: number, yMm: number): number {
    const t = this.stamp();
    this.frames.push({ type: "pinch_down", x_mm: xMm, y_mm: yMm, t_s: t });
    return t;
  }
  sendGaze(xMm: number, yMm: number): number | null {
    const t = this.stamp();
    this.frames.push({ type: "gaze", x_mm: xMm, y_mm: yMm, t_s: t });
    return t;
  }
  sendPinchUp(xMm: number, yMm: number): number {
    const t = this.stamp();
    this.frames.push({ type: "pinch_up", x_mm: xMm, y_mm: yMm, t_s: t });
    return t;
  }
  sendSelect(index: number): void {
    this.frames.push({ type: "select", index });
  }
  sendDelete(): void {
    this.frames.push({ type: "delete" });
  }
  sendPeekEnter(): void {
    this.frames.push({ type: "peek_enter" });
  }

  ofType(type: string): SentFrame[] {
    return this.frames.filter((f) => f.type === type);
  }
}
