"""Live demo service: one typing session per socket connection.

JSON frame protocol (documented bit-exactly in docs/protocol.md):
client -> server  {seq, type: pinch_down|gaze|pinch_up|select|delete|
                   peek_enter|trial|layout, x_mm?, y_mm?, t_s?, valid?,
                   index?, presented?}
server -> client  {ack_seq, type: candidates|commit|text|peek|layout|error,
                   words?, word?, text?, latency_us?, layout?, reason?}

Malformed or out-of-protocol frames produce an error frame and leave the
session intact.  On disconnect the connection's accepted events are written
as session_events.jsonl for offline metrics.
"""

from __future__ import annotations

import itertools
import json
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .dataio import Assets, write_session_events
from .decoder import DecodeError, Decoder
from .session import ProtocolError, SessionEvent, TypingSession
from .tap import TapConfig
from .trace_pipeline import PipelineConfig, TraceError

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>gazeswipe</title></head>
<body><h1>gazeswipe service</h1>
<p>No UI bundle found. Connect a socket client to <code>/ws</code>;
fetch the keyboard geometry from <code>/layout</code>.</p>
</body></html>
"""


def create_app(
    assets: Assets,
    decoder: Decoder,
    pipeline_config: PipelineConfig = PipelineConfig(),
    tap_config: TapConfig = TapConfig(),
    log_dir: Path | None = None,
    static_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="gazeswipe demo service")
    log_dir = Path(log_dir) if log_dir else Path("session_logs")
    conn_counter = itertools.count()

    @app.get("/layout")
    def get_layout():
        return JSONResponse(assets.layout.to_dict())

    @app.get("/health")
    def health():
        return {"status": "ok", "lexicon_words": len(assets.lexicon)}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session = TypingSession(decoder, assets.char_model, pipeline_config, tap_config)
        conn_log: list[SessionEvent] = []
        conn_id = next(conn_counter)

        async def send(frame: dict) -> None:
            await ws.send_text(json.dumps(frame))

        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("frame must be a JSON object")
                except ValueError as exc:
                    await send({"ack_seq": None, "type": "error", "reason": f"bad frame: {exc}"})
                    continue
                seq = msg.get("seq")
                try:
                    reply = _handle(msg, session, assets)
                    if msg.get("type") == "trial":
                        conn_log.extend(session.events)
                        conn_log.append(SessionEvent("trial", presented=str(msg.get("presented", ""))))
                        session = TypingSession(decoder, assets.char_model, pipeline_config, tap_config)
                        reply = {"type": "text", "text": ""}
                except (ProtocolError, TraceError, DecodeError, KeyError, TypeError, ValueError) as exc:
                    await send({"ack_seq": seq, "type": "error", "reason": str(exc)})
                    continue
                if reply is not None:
                    reply["ack_seq"] = seq
                    await send(reply)
        except WebSocketDisconnect:
            pass
        finally:
            conn_log.extend(session.events)
            if conn_log:
                log_dir.mkdir(parents=True, exist_ok=True)
                stamp = time.strftime("%Y%m%d-%H%M%S")
                write_session_events(conn_log, log_dir / f"session-{stamp}-{conn_id:04d}.jsonl")

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def _handle(msg: dict, session: TypingSession, assets: Assets) -> dict | None:
    """Apply one client frame to the session; returns the reply frame or None."""
    kind = msg.get("type")
    if kind == "layout":
        return {"type": "layout", "layout": assets.layout.to_dict()}
    if kind == "trial":
        return None  # handled by the caller (needs a session swap)
    if kind == "pinch_down":
        session.on_pinch_down(float(msg["x_mm"]), float(msg["y_mm"]), float(msg["t_s"]))
        return {"type": "text", "text": session.committed_text}
    if kind == "gaze":
        ranking = session.on_gaze(
            float(msg["x_mm"]), float(msg["y_mm"]), float(msg["t_s"]), bool(msg.get("valid", True))
        )
        if ranking is None:
            return None
        return {"type": "candidates", "words": ranking.words(), "latency_us": ranking.latency_us}
    if kind == "pinch_up":
        outcome = session.on_pinch_up(float(msg["x_mm"]), float(msg["y_mm"]), float(msg["t_s"]))
        if outcome.kind == "commit":
            return {
                "type": "commit",
                "word": outcome.word,
                "words": outcome.ranking.words(),
                "text": session.committed_text,
                "latency_us": outcome.ranking.latency_us,
            }
        return {"type": "text", "text": session.committed_text}
    if kind == "select":
        session.select_candidate(int(msg["index"]))
        return {"type": "text", "text": session.committed_text}
    if kind == "delete":
        session.delete_press()
        return {"type": "text", "text": session.committed_text}
    if kind == "peek_enter":
        return {"type": "peek", "text": session.peek_enter()}
    raise ProtocolError(f"unknown frame type {kind!r}")
