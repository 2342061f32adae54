// Frame types for the websocket protocol spoken by the decoding service.
// Client frames carry a monotone `seq`; every server reply echoes it as
// `ack_seq` (null when the frame could not even be parsed).

export interface KeyRect {
  label: string;
  cx_mm: number;
  cy_mm: number;
  w_mm: number;
  h_mm: number;
}

export interface Layout {
  keys: KeyRect[];
  viewing_distance_mm: number;
}

export type ClientFrame =
  | { seq: number; type: "pinch_down"; x_mm: number; y_mm: number; t_s: number }
  | { seq: number; type: "gaze"; x_mm: number; y_mm: number; t_s: number; valid?: boolean }
  | { seq: number; type: "pinch_up"; x_mm: number; y_mm: number; t_s: number }
  | { seq: number; type: "select"; index: number }
  | { seq: number; type: "delete" }
  | { seq: number; type: "peek_enter" }
  | { seq: number; type: "trial"; presented: string }
  | { seq: number; type: "layout" };

export type ServerFrame =
  | { ack_seq: number | null; type: "text"; text: string }
  | { ack_seq: number | null; type: "candidates"; words: string[]; latency_us: number }
  | {
      ack_seq: number | null;
      type: "commit";
      word: string;
      words: string[];
      text: string;
      latency_us: number;
    }
  | { ack_seq: number | null; type: "peek"; text: string }
  | { ack_seq: number | null; type: "layout"; layout: Layout }
  | { ack_seq: number | null; type: "error"; reason: string };

const SERVER_TYPES = new Set(["text", "candidates", "commit", "peek", "layout", "error"]);

export function parseServerFrame(raw: string): ServerFrame {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new Error(`unparseable server frame: ${raw.slice(0, 80)}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error("server frame must be a JSON object");
  }
  const frame = obj as Record<string, unknown>;
  if (typeof frame.type !== "string" || !SERVER_TYPES.has(frame.type)) {
    throw new Error(`unknown server frame type: ${String(frame.type)}`);
  }
  return frame as unknown as ServerFrame;
}

export function isLayout(obj: unknown): obj is Layout {
  if (typeof obj !== "object" || obj === null) return false;
  const l = obj as Record<string, unknown>;
  if (!Array.isArray(l.keys) || typeof l.viewing_distance_mm !== "number") return false;
  return l.keys.every(
    (k) =>
      typeof k === "object" &&
      k !== null &&
      typeof (k as KeyRect).label === "string" &&
      typeof (k as KeyRect).cx_mm === "number" &&
      typeof (k as KeyRect).cy_mm === "number" &&
      typeof (k as KeyRect).w_mm === "number" &&
      typeof (k as KeyRect).h_mm === "number",
  );
}
