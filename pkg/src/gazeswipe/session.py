"""Typing-session state machine: swipe lifecycle, taps, candidate reselection.

One pinch-hold delimits one swipe.  Release over the delete key cancels the
swipe; release without ever leaving the start key is a single-letter tap;
anything else decodes to a word commit with retained alternates.  Delete
presses remove the whole last word right after a swipe commit and a single
character otherwise.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .decoder import CandidateRanking, Decoder
from .geometry import KeyboardLayout
from .lexicon import CharNgramModel
from .tap import TapConfig, infer_letter
from .trace_pipeline import GazeSample, PipelineConfig, prune


class ProtocolError(RuntimeError):
    """Event arrived in a state that cannot accept it."""


class LastAction(enum.Enum):
    NONE = "none"
    SWIPE_COMMIT = "swipe_commit"
    CANDIDATE_SWAP = "candidate_swap"
    CHAR_ENTRY = "char_entry"
    DELETE = "delete"


# Event type tags mirror the service wire protocol.
EVENT_TYPES = ("trial", "pinch_down", "gaze", "pinch_up", "select", "delete", "peek_enter", "key_tap")


@dataclass(frozen=True)
class SessionEvent:
    """One log line; which fields are set depends on the type tag."""

    type: str
    t_s: float | None = None
    x_mm: float | None = None
    y_mm: float | None = None
    valid: bool = True
    index: int | None = None
    presented: str | None = None

    def __post_init__(self):
        if self.type not in EVENT_TYPES:
            raise ValueError(f"unknown event type {self.type!r}")

    def to_json(self) -> str:
        d = {"type": self.type}
        if self.t_s is not None:
            d["t_s"] = self.t_s
        if self.x_mm is not None:
            d["x_mm"] = self.x_mm
            d["y_mm"] = self.y_mm
        if not self.valid:
            d["valid"] = False
        if self.index is not None:
            d["index"] = self.index
        if self.presented is not None:
            d["presented"] = self.presented
        return json.dumps(d)

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        d = json.loads(line)
        return cls(
            type=d["type"],
            t_s=d.get("t_s"),
            x_mm=d.get("x_mm"),
            y_mm=d.get("y_mm"),
            valid=d.get("valid", True),
            index=d.get("index"),
            presented=d.get("presented"),
        )


@dataclass(frozen=True)
class PinchOutcome:
    """Result of ending a pinch: cancel | tap | commit."""

    kind: str
    letter: str | None = None
    word: str | None = None
    ranking: CandidateRanking | None = None


@dataclass(frozen=True)
class CommitOutcome:
    """One committed swipe with the ranking shown at commit time."""

    word: str
    candidates: tuple[str, ...]
    t_s: float


class TypingSession:
    """Mutable per-user session; all coordinates in layout mm, times in s.

    Methods that accept events also append them to self.events so a live
    session doubles as its own recorder; replaying that log through a fresh
    session reproduces the text exactly.
    """

    def __init__(
        self,
        decoder: Decoder,
        char_model: CharNgramModel | None = None,
        pipeline_config: PipelineConfig = PipelineConfig(),
        tap_config: TapConfig = TapConfig(),
        record: bool = True,
    ):
        self.decoder = decoder
        self.layout: KeyboardLayout = decoder.layout
        self.char_model = char_model or CharNgramModel()
        self.pipeline_config = pipeline_config
        self.tap_config = tap_config
        self.record = record

        self.committed_text = ""
        self.live_candidates: list[str] = []
        self.last_action = LastAction.NONE
        self.events: list[SessionEvent] = []
        self.commits: list[CommitOutcome] = []
        self.erased_chars = 0

        self._buffer: list[GazeSample] = []
        self._pinched = False
        self._start_key: str | None = None
        self._last_decode_key: str | None = None
        self._midswipe_decodes = 0

    # -- derived ----------------------------------------------------------

    @property
    def context_words(self) -> tuple[str, ...]:
        return tuple(self.committed_text.split())

    @property
    def swipe_in_flight(self) -> bool:
        return self._pinched

    def peek(self) -> str:
        """Current text for the deletion peek window; never mutates."""
        return self.committed_text

    # -- event handlers ----------------------------------------------------

    def on_pinch_down(self, x_mm: float, y_mm: float, t_s: float) -> None:
        if self._pinched:
            raise ProtocolError("pinch_down while a swipe is in flight")
        self._log(SessionEvent("pinch_down", t_s=t_s, x_mm=x_mm, y_mm=y_mm))
        self._pinched = True
        self._buffer = [GazeSample(t_s, x_mm, y_mm)]
        self._start_key = self.layout.key_at(x_mm, y_mm)
        self._last_decode_key = self._start_key
        self.live_candidates = []
        self._midswipe_decodes = 0

    def on_gaze(
        self, x_mm: float, y_mm: float, t_s: float, valid: bool = True
    ) -> CandidateRanking | None:
        """Buffer a sample; emit a fresh ranking when gaze settles on a new key."""
        if not self._pinched:
            raise ProtocolError("gaze sample outside a swipe")
        self._log(SessionEvent("gaze", t_s=t_s, x_mm=x_mm, y_mm=y_mm, valid=valid))
        self._buffer_sample(GazeSample(t_s, x_mm, y_mm, valid=valid))
        if not valid:
            return None
        # Cheap gate: while the raw point stays on the key of the last
        # emission there can be no new newest-centroid key, so skip pruning.
        if self.layout.key_at(x_mm, y_mm) == self._last_decode_key:
            return None
        pruned = prune(self._buffer, self.pipeline_config, self.layout)
        newest_key = self._centroid_key(pruned.points[-1])
        if newest_key == self._last_decode_key:
            return None
        self._last_decode_key = newest_key
        ranking = self.decoder.decode_midswipe(pruned, self.context_words)
        self._midswipe_decodes += 1
        self.live_candidates = ranking.words()
        return ranking

    def on_pinch_up(self, x_mm: float, y_mm: float, t_s: float) -> PinchOutcome:
        if not self._pinched:
            raise ProtocolError("pinch_up without a swipe in flight")
        self._log(SessionEvent("pinch_up", t_s=t_s, x_mm=x_mm, y_mm=y_mm))
        self._buffer_sample(GazeSample(t_s, x_mm, y_mm))
        buffer, start_key = self._buffer, self._start_key
        self._pinched = False
        self._buffer = []
        self._start_key = None

        # (a) released over delete: cancel, text untouched
        if self.layout.key_at(x_mm, y_mm) == "delete":
            self.live_candidates = []
            return PinchOutcome("cancel")

        pruned = prune(buffer, self.pipeline_config, self.layout)
        keys = [self._centroid_key(p) for p in pruned.points]

        # (b) gaze never settled off the start key: single-letter tap
        if all(k == start_key for k in keys):
            if start_key == "space":
                letter = " "
            else:
                cx, cy = self.layout.denormalize(pruned.points[:, :2]).mean(axis=0)
                ranked = infer_letter(
                    float(cx), float(cy), self._tap_prefix(), self.layout, self.char_model, self.tap_config
                )
                letter = ranked[0][0]
            self.committed_text += letter
            self.last_action = LastAction.CHAR_ENTRY
            self.live_candidates = []
            return PinchOutcome("tap", letter=letter)

        # (c) full decode and auto-commit of the top candidate
        ranking = self.decoder.decode(pruned, self.context_words)
        word = ranking.candidates[0].word
        self.committed_text += word + " "
        self.last_action = LastAction.SWIPE_COMMIT
        self.live_candidates = ranking.words()
        self.commits.append(CommitOutcome(word, tuple(self.live_candidates), t_s))
        return PinchOutcome("commit", word=word, ranking=ranking)

    def select_candidate(self, index: int) -> str:
        """Swap the last committed word for retained candidate `index`."""
        if self.last_action not in (LastAction.SWIPE_COMMIT, LastAction.CANDIDATE_SWAP):
            raise ProtocolError("no reselection window open")
        if not self.live_candidates:
            raise ProtocolError("no retained candidates")
        if not 0 <= index < len(self.live_candidates):
            raise ProtocolError(f"candidate index {index} out of range")
        self._log(SessionEvent("select", index=index))
        head, _, _ = self.committed_text.rstrip(" ").rpartition(" ")
        replacement = self.live_candidates[index]
        self.committed_text = (head + " " if head else "") + replacement + " "
        self.last_action = LastAction.CANDIDATE_SWAP
        if self.commits:
            old = self.commits[-1]
            self.commits[-1] = CommitOutcome(replacement, old.candidates, old.t_s)
        return self.committed_text

    def delete_press(self) -> str:
        """Whole last word right after a swipe commit, else one character."""
        self._log(SessionEvent("delete"))
        if not self.committed_text:
            return self.committed_text
        if self.last_action is LastAction.SWIPE_COMMIT:
            head, _, _ = self.committed_text.rstrip(" ").rpartition(" ")
            removed = len(self.committed_text) - (len(head) + 1 if head else 0)
            self.committed_text = head + " " if head else ""
        else:
            removed = 1
            self.committed_text = self.committed_text[:-1]
        self.erased_chars += removed
        self.last_action = LastAction.DELETE
        self.live_candidates = []
        return self.committed_text

    def key_tap(self, x_mm: float, y_mm: float, t_s: float) -> str:
        """Direct tap (no swipe lifecycle): append the inferred letter."""
        if self._pinched:
            raise ProtocolError("key_tap while a swipe is in flight")
        self._log(SessionEvent("key_tap", t_s=t_s, x_mm=x_mm, y_mm=y_mm))
        ranked = infer_letter(
            x_mm, y_mm, self._tap_prefix(), self.layout, self.char_model, self.tap_config
        )
        letter = ranked[0][0]
        self.committed_text += letter
        self.last_action = LastAction.CHAR_ENTRY
        self.live_candidates = []
        return letter

    def peek_enter(self) -> str:
        """Gaze reached the delete key; log it and surface the peek text."""
        self._log(SessionEvent("peek_enter"))
        return self.committed_text

    # -- internals ---------------------------------------------------------

    def _log(self, event: SessionEvent) -> None:
        if self.record:
            self.events.append(event)

    def _buffer_sample(self, sample: GazeSample) -> None:
        # Drop non-advancing timestamps so velocity never sees dt <= 0.
        if self._buffer and sample.t <= self._buffer[-1].t:
            return
        self._buffer.append(sample)

    def _centroid_key(self, point_xyt: np.ndarray) -> str | None:
        x_mm, y_mm = self.layout.denormalize(point_xyt[:2])
        return self.layout.key_at(float(x_mm), float(y_mm))

    def _tap_prefix(self) -> str:
        tail = self.committed_text.rsplit(" ", 1)[-1]
        return tail


@dataclass
class TrialReplay:
    """Replay of one presented phrase from an event log."""

    presented: str
    final_text: str
    erased_chars: int
    commits: list[CommitOutcome]
    duration_s: float


@dataclass
class ReplayResult:
    final_text: str
    erased_chars: int
    commits: list[CommitOutcome]
    duration_s: float
    trials: list[TrialReplay] = field(default_factory=list)


def apply_event(session: TypingSession, event: SessionEvent) -> None:
    if event.type == "pinch_down":
        session.on_pinch_down(event.x_mm, event.y_mm, event.t_s)
    elif event.type == "gaze":
        session.on_gaze(event.x_mm, event.y_mm, event.t_s, valid=event.valid)
    elif event.type == "pinch_up":
        session.on_pinch_up(event.x_mm, event.y_mm, event.t_s)
    elif event.type == "select":
        session.select_candidate(event.index)
    elif event.type == "delete":
        session.delete_press()
    elif event.type == "peek_enter":
        session.peek_enter()
    elif event.type == "key_tap":
        session.key_tap(event.x_mm, event.y_mm, event.t_s)
    else:
        raise ProtocolError(f"cannot replay event type {event.type!r}")


def replay_events(events: Iterable[SessionEvent], make_session) -> ReplayResult:
    """Drive a fresh session through an event log.

    `trial` records split the log into presented phrases, each replayed on its
    own session so text does not leak across trials.  make_session is a
    zero-argument factory returning a TypingSession.
    """
    trials: list[TrialReplay] = []
    session: TypingSession | None = None
    presented = ""
    t_first: float | None = None
    t_last: float | None = None
    total_commits: list[CommitOutcome] = []
    total_erased = 0
    final_text = ""

    def close_trial():
        nonlocal total_erased, final_text
        if session is None:
            return
        duration = (t_last - t_first) if t_first is not None and t_last is not None else 0.0
        trials.append(
            TrialReplay(presented, session.committed_text, session.erased_chars, list(session.commits), duration)
        )
        total_commits.extend(session.commits)
        total_erased += session.erased_chars
        final_text = session.committed_text

    for ev in events:
        if ev.type == "trial":
            close_trial()
            session = make_session()
            presented = ev.presented or ""
            t_first = t_last = None
            continue
        if session is None:
            session = make_session()
        if ev.t_s is not None:
            t_first = ev.t_s if t_first is None else t_first
            t_last = ev.t_s
        apply_event(session, ev)
    close_trial()

    duration = sum(t.duration_s for t in trials)
    return ReplayResult(final_text, total_erased, total_commits, duration, trials)
