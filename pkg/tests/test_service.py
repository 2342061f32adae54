"""Demo-service checks: HTTP endpoints, socket frame protocol, event logs.

Every socket test runs against the toy five-word vocabulary so commit words
are exact. Gaze frames mostly get no reply (the service only emits candidates
when the newest settled key changes), so tests send a whole swipe and then
drain replies until the terminal frame arrives.
"""

from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from gazeswipe.dataio import Assets, read_session_events
from gazeswipe.service import create_app
from gazeswipe.session import TypingSession, replay_events

from helpers import dwell_glide_stream

TEASER_WORDS = ["today", "to", "the", "tomorrow"]


@pytest.fixture()
def service(tmp_path, layout, teaser_lexicon, teaser_models, teaser_decoder):
    word_model, char_model = teaser_models
    assets = Assets(layout, teaser_lexicon, word_model, char_model)
    log_dir = tmp_path / "logs"
    app = create_app(assets, teaser_decoder, log_dir=log_dir)
    return TestClient(app), log_dir


def _swipe_frames(layout, letters, seq0=0, t0=0.0):
    """Client frames for one pinch-swipe-release over the letter centers."""
    stream = dwell_glide_stream([tuple(layout.key_center(c)) for c in letters], t0=t0)
    (t, x, y), rest = stream[0], stream[1:]
    frames = [{"seq": seq0, "type": "pinch_down", "x_mm": x, "y_mm": y, "t_s": t}]
    for i, (t, x, y) in enumerate(rest, start=1):
        frames.append({"seq": seq0 + i, "type": "gaze", "x_mm": x, "y_mm": y, "t_s": t})
    t_up, x_up, y_up = rest[-1][0] + 0.005, rest[-1][1], rest[-1][2]
    frames.append({"seq": seq0 + len(rest) + 1, "type": "pinch_up", "x_mm": x_up, "y_mm": y_up, "t_s": t_up})
    return frames


def _drive(ws, frames, until="commit"):
    """Send every frame, then drain replies until the given type arrives."""
    for f in frames:
        ws.send_text(json.dumps(f))
    seen = []
    while True:
        frame = json.loads(ws.receive_text())
        seen.append(frame)
        if frame["type"] == until:
            return seen


def _send(ws, frame):
    ws.send_text(json.dumps(frame))
    return json.loads(ws.receive_text())


def _wait_for_logs(log_dir, n=1, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        logs = sorted(log_dir.glob("session-*.jsonl"))
        if len(logs) >= n:
            return logs
        time.sleep(0.02)
    raise AssertionError(f"expected {n} session log(s) in {log_dir}")


# -- HTTP ---------------------------------------------------------------------


def test_layout_endpoint(service, layout):
    client, _ = service
    resp = client.get("/layout")
    assert resp.status_code == 200
    body = resp.json()
    assert body == layout.to_dict()
    labels = {k["label"] for k in body["keys"]}
    assert len(labels & set("abcdefghijklmnopqrstuvwxyz")) == 26
    assert {"space", "delete"} <= labels


def test_health_endpoint(service):
    client, _ = service
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "lexicon_words": 5}


def test_index_fallback_page(service):
    client, _ = service
    resp = client.get("/")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/html")
    assert "gazeswipe service" in resp.text


def test_static_dir_replaces_fallback(tmp_path, layout, teaser_lexicon, teaser_models, teaser_decoder):
    word_model, char_model = teaser_models
    assets = Assets(layout, teaser_lexicon, word_model, char_model)
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>bundled ui</body></html>")
    client = TestClient(create_app(assets, teaser_decoder, static_dir=ui))
    assert "bundled ui" in client.get("/").text
    # API routes are registered before the mount and keep working
    assert client.get("/health").json()["status"] == "ok"
    assert client.get("/layout").json() == layout.to_dict()


# -- socket protocol ------------------------------------------------------------


def test_layout_frame(service, layout):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        reply = _send(ws, {"seq": 0, "type": "layout"})
        assert reply["type"] == "layout"
        assert reply["ack_seq"] == 0
        assert reply["layout"] == layout.to_dict()


def test_swipe_commits_and_streams_candidates(service, layout):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        frames = _swipe_frames(layout, "to")
        seen = _drive(ws, frames)

        assert seen[0] == {"type": "text", "text": "", "ack_seq": 0}
        mid = [f for f in seen if f["type"] == "candidates"]
        assert mid, "no live candidate frame during the swipe"
        assert mid[-1]["words"][0] == "today"

        commit = seen[-1]
        assert commit["ack_seq"] == frames[-1]["seq"]
        assert commit["word"] == "today"
        assert commit["words"] == TEASER_WORDS
        assert commit["text"] == "today "
        assert commit["latency_us"] > 0


def test_malformed_frames_keep_connection(service):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{not json")
        err = json.loads(ws.receive_text())
        assert err["type"] == "error"
        assert err["ack_seq"] is None
        assert err["reason"].startswith("bad frame")

        ws.send_text("[1, 2, 3]")
        err = json.loads(ws.receive_text())
        assert err["type"] == "error"
        assert "JSON object" in err["reason"]

        reply = _send(ws, {"seq": 9, "type": "layout"})
        assert reply["type"] == "layout"


def test_unknown_frame_type(service):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        err = _send(ws, {"seq": 7, "type": "warp"})
        assert err["type"] == "error"
        assert err["ack_seq"] == 7
        assert "unknown frame type" in err["reason"]


def test_missing_field_is_an_error(service):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        err = _send(ws, {"seq": 3, "type": "pinch_down", "x_mm": 1.0})
        assert err["type"] == "error"
        assert err["ack_seq"] == 3


def test_protocol_violation_leaves_session_usable(service, layout):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        err = _send(ws, {"seq": 0, "type": "pinch_up", "x_mm": 0.0, "y_mm": 0.0, "t_s": 0.0})
        assert err["type"] == "error"
        assert "swipe" in err["reason"]

        seen = _drive(ws, _swipe_frames(layout, "to", seq0=1, t0=1.0))
        assert seen[-1]["word"] == "today"


def test_peek_select_delete(service, layout):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        _drive(ws, _swipe_frames(layout, "to"))

        peek = _send(ws, {"seq": 500, "type": "peek_enter"})
        assert peek == {"type": "peek", "text": "today ", "ack_seq": 500}

        sel = _send(ws, {"seq": 501, "type": "select", "index": 1})
        assert sel["type"] == "text"
        assert sel["text"] == "to "

        sel = _send(ws, {"seq": 502, "type": "select", "index": 2})
        assert sel["text"] == "the "

        # one character after a swap; the whole-word rule only follows a commit
        dele = _send(ws, {"seq": 503, "type": "delete"})
        assert dele["text"] == "the"

        err = _send(ws, {"seq": 504, "type": "select", "index": 0})
        assert err["type"] == "error"
        assert "window" in err["reason"]


def test_whole_word_delete_after_commit(service, layout):
    client, _ = service
    with client.websocket_connect("/ws") as ws:
        _drive(ws, _swipe_frames(layout, "to"))
        dele = _send(ws, {"seq": 400, "type": "delete"})
        assert dele == {"type": "text", "text": "", "ack_seq": 400}


def test_trial_frame_swaps_session(service, layout):
    client, log_dir = service
    with client.websocket_connect("/ws") as ws:
        _drive(ws, _swipe_frames(layout, "to"))
        reply = _send(ws, {"seq": 900, "type": "trial", "presented": "to be"})
        assert reply == {"type": "text", "text": "", "ack_seq": 900}

        seen = _drive(ws, _swipe_frames(layout, "to", seq0=1000, t0=100.0))
        assert seen[-1]["text"] == "today "

    log = _wait_for_logs(log_dir)[-1]
    events = read_session_events(log)
    assert [e.type for e in events].count("trial") == 1
    assert next(e for e in events if e.type == "trial").presented == "to be"


def test_session_log_replays_to_same_text(service, layout, teaser_decoder, teaser_models):
    client, log_dir = service
    with client.websocket_connect("/ws") as ws:
        _drive(ws, _swipe_frames(layout, "to"))
        _send(ws, {"seq": 600, "type": "select", "index": 1})

    events = read_session_events(_wait_for_logs(log_dir)[-1])
    _, char_model = teaser_models

    def make_session():
        return TypingSession(teaser_decoder, char_model, record=False)

    result = replay_events(events, make_session)
    assert result.final_text == "to "
    assert [c.word for c in result.commits] == ["to"]


def test_no_log_for_eventless_connection(service):
    client, log_dir = service
    with client.websocket_connect("/ws") as ws:
        _send(ws, {"seq": 0, "type": "layout"})
    time.sleep(0.1)
    assert not log_dir.exists() or not list(log_dir.glob("session-*.jsonl"))
