import { isLayout } from "./protocol.js";
import { KeyboardRenderer } from "./keyboard.js";
import { ServiceClient } from "./client.js";
import { SwipeApp, wireCanvas } from "./app.js";

export async function boot(doc: Document, win: Window & typeof globalThis): Promise<void> {
  const canvas = doc.getElementById("kbd") as HTMLCanvasElement;
  const textEl = doc.getElementById("text")!;
  const wpmEl = doc.getElementById("wpm")!;
  const peekEl = doc.getElementById("peek")!;
  const bannerEl = doc.getElementById("banner")!;

  let layoutJson: unknown;
  try {
    const resp = await win.fetch("/layout");
    if (!resp.ok) throw new Error(`HTTP ${resp.status}`);
    layoutJson = await resp.json();
  } catch (err) {
    bannerEl.textContent = `layout fetch failed: ${String(err)}`;
    return;
  }
  if (!isLayout(layoutJson)) {
    bannerEl.textContent = "layout fetch failed: malformed layout JSON";
    return;
  }

  canvas.width = win.innerWidth;
  canvas.height = Math.round(win.innerHeight * 0.7);
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    bannerEl.textContent = "canvas 2d context unavailable";
    return;
  }

  const renderer = new KeyboardRenderer(ctx, layoutJson, canvas.width, canvas.height);
  const app = new SwipeApp(renderer);
  const proto = win.location.protocol === "https:" ? "wss:" : "ws:";
  const client = new ServiceClient(
    `${proto}//${win.location.host}/ws`,
    (url) => new win.WebSocket(url),
    {
      onFrame: (f) => app.onFrame(f),
      onOpen: () => app.onOpen(),
      onDrop: () => app.onDrop(),
    },
  );
  app.client = client;
  client.connect();
  wireCanvas(canvas, app);

  const tick = () => {
    app.draw();
    textEl.textContent = app.state.text.length > 0 ? app.state.text : " ";
    wpmEl.textContent = `WPM ${app.wpm.display()}`;
    peekEl.textContent = app.state.peekText ?? "";
    (peekEl as HTMLElement).style.display = app.state.peekText === null ? "none" : "block";
    bannerEl.textContent = app.state.banner ?? "";
    (bannerEl as HTMLElement).style.display = app.state.banner === null ? "none" : "block";
    win.requestAnimationFrame(tick);
  };
  win.requestAnimationFrame(tick);
}

if (typeof document !== "undefined" && document.getElementById("kbd") !== null) {
  void boot(document, window);
}
