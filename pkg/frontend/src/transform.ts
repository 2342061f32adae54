import type { Layout } from "./protocol.js";

// Affine fit of the layout's mm bounding box into a pixel viewport. The same
// scale/offset pair serves both directions, so px->mm is the exact inverse of
// the render transform up to float rounding (far inside the 0.5 mm budget).
export class ViewTransform {
  readonly scale: number; // px per mm
  readonly offsetXPx: number;
  readonly offsetYPx: number;

  constructor(layout: Layout, widthPx: number, heightPx: number, marginMm = 8) {
    if (layout.keys.length === 0) throw new Error("layout has no keys");
    let minX = Infinity;
    let maxX = -Infinity;
    let minY = Infinity;
    let maxY = -Infinity;
    for (const k of layout.keys) {
      minX = Math.min(minX, k.cx_mm - k.w_mm / 2);
      maxX = Math.max(maxX, k.cx_mm + k.w_mm / 2);
      minY = Math.min(minY, k.cy_mm - k.h_mm / 2);
      maxY = Math.max(maxY, k.cy_mm + k.h_mm / 2);
    }
    minX -= marginMm;
    maxX += marginMm;
    minY -= marginMm;
    maxY += marginMm;
    this.scale = Math.min(widthPx / (maxX - minX), heightPx / (maxY - minY));
    // center the board in the viewport
    this.offsetXPx = (widthPx - (maxX - minX) * this.scale) / 2 - minX * this.scale;
    this.offsetYPx = (heightPx - (maxY - minY) * this.scale) / 2 - minY * this.scale;
  }

  mmToPx(xMm: number, yMm: number): { x: number; y: number } {
    return { x: xMm * this.scale + this.offsetXPx, y: yMm * this.scale + this.offsetYPx };
  }

  pxToMm(xPx: number, yPx: number): { x_mm: number; y_mm: number } {
    return {
      x_mm: (xPx - this.offsetXPx) / this.scale,
      y_mm: (yPx - this.offsetYPx) / this.scale,
    };
  }
}
