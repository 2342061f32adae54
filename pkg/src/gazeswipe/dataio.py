"""Canonical file formats: trace records, session event logs, data discovery.

Traces are JSON lines, one record per line, coordinates in mm in the layout
frame, timestamps in seconds from swipe start.  The dataset import adapter
maps an external word-level swipe corpus into this format without inventing
or dropping samples; its coordinate frame is declared in the source manifest
rather than guessed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .geometry import KeyboardLayout, load_layout
from .lexicon import CharNgramModel, Lexicon, WordNgramModel
from .session import SessionEvent
from .trace_pipeline import GazeSample

WORD_RE_SET = set("abcdefghijklmnopqrstuvwxyz")


class DataFormatError(ValueError):
    pass


class DatasetNotFoundError(FileNotFoundError):
    pass


@dataclass
class TraceRecord:
    """One intended word with its raw gaze stream and optional hit points."""

    record_id: str
    technique: str
    word: str
    samples: list[GazeSample]
    context: str = ""
    hit_points: list[tuple[float, float]] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.word or not set(self.word) <= WORD_RE_SET:
            raise DataFormatError(f"intended word must be lowercase a-z, got {self.word!r}")
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DataFormatError("samples must be strictly time-ordered")

    def to_dict(self) -> dict:
        d: dict = {
            "record_id": self.record_id,
            "technique": self.technique,
            "word": self.word,
            "samples": [
                [s.t, s.x_mm, s.y_mm] if s.valid else [s.t, s.x_mm, s.y_mm, 0]
                for s in self.samples
            ],
        }
        if self.context:
            d["context"] = self.context
        if any(s.gaze_dir is not None for s in self.samples):
            d["gaze_dirs"] = [list(s.gaze_dir) if s.gaze_dir else None for s in self.samples]
        if self.hit_points is not None:
            d["hit_points"] = [list(p) for p in self.hit_points]
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TraceRecord":
        dirs = d.get("gaze_dirs") or [None] * len(d["samples"])
        if len(dirs) != len(d["samples"]):
            raise DataFormatError("gaze_dirs length differs from samples")
        samples = []
        for row, gd in zip(d["samples"], dirs):
            if not 3 <= len(row) <= 4:
                raise DataFormatError(f"sample row must be [t, x, y(, valid)], got {row!r}")
            t, x, y = float(row[0]), float(row[1]), float(row[2])
            valid = bool(row[3]) if len(row) == 4 else True
            samples.append(GazeSample(t, x, y, gaze_dir=tuple(gd) if gd else None, valid=valid))
        hit = d.get("hit_points")
        return cls(
            record_id=str(d["record_id"]),
            technique=str(d.get("technique", "unknown")),
            word=d["word"],
            samples=samples,
            context=d.get("context", ""),
            hit_points=[(float(p[0]), float(p[1])) for p in hit] if hit is not None else None,
            meta=d.get("meta", {}),
        )


def write_traces(records: list[TraceRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict()) + "\n")


def read_traces(path: str | Path, lenient: bool = False) -> tuple[list[TraceRecord], list[str]]:
    """Parse a trace file; returns (records, problems).

    Strict mode raises DataFormatError at the first malformed line; lenient
    mode skips it and appends "line N: why" to problems instead.
    """
    records: list[TraceRecord] = []
    problems: list[str] = []
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(TraceRecord.from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                msg = f"line {n}: {exc}"
                if not lenient:
                    raise DataFormatError(msg) from exc
                problems.append(msg)
    return records, problems


# -- session event logs ----------------------------------------------------


def write_session_events(events: list[SessionEvent], path: str | Path) -> None:
    with open(path, "w") as fh:
        for ev in events:
            fh.write(ev.to_json() + "\n")


def read_session_events(path: str | Path) -> list[SessionEvent]:
    events = []
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(SessionEvent.from_json(line))
            except (ValueError, KeyError) as exc:
                raise DataFormatError(f"line {n}: {exc}") from exc
    return events


# -- external dataset import -------------------------------------------------

KNOWN_SCHEMA_VERSIONS = ("1",)
CORE_RECORD_KEYS = {"word", "gaze"}


@dataclass
class ImportReport:
    record_count: int
    sample_count: int
    techniques: dict[str, int]
    unique_words: int
    skipped: list[str] = field(default_factory=list)


def import_dataset(
    source_dir: str | Path,
    out_path: str | Path,
    layout: KeyboardLayout | None = None,
) -> ImportReport:
    """Convert an external word-level swipe dataset into traces.jsonl.

    The source directory must hold manifest.json declaring schema_version and
    the coordinate frame ("mm", "normalized", or "px" with px_per_mm and
    optional origin_px), plus records.jsonl with one attempt per line:
    {word, gaze: [[t, x, y(, valid)], ...], technique?, context?, hits?, ...}.
    Unmapped per-record fields are preserved under meta.
    """
    source = Path(source_dir)
    manifest_path = source / "manifest.json"
    records_path = source / "records.jsonl"
    if not source.is_dir() or not manifest_path.exists() or not records_path.exists():
        raise DatasetNotFoundError(f"no dataset at {source} (need manifest.json + records.jsonl)")

    manifest = json.loads(manifest_path.read_text())
    version = str(manifest.get("schema_version"))
    if version not in KNOWN_SCHEMA_VERSIONS:
        with open(records_path) as fh:
            first = json.loads(fh.readline() or "{}")
        raise DataFormatError(
            f"unknown dataset schema version {version!r}; observed record keys: {sorted(first)}"
        )
    frame = manifest.get("frame", "mm")
    to_mm = _frame_converter(frame, manifest, layout)

    records: list[TraceRecord] = []
    techniques: dict[str, int] = {}
    sample_count = 0
    skipped: list[str] = []
    with open(records_path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = _convert_record(json.loads(line), n, to_mm)
            except (ValueError, KeyError, TypeError) as exc:
                skipped.append(f"line {n}: {exc}")
                continue
            records.append(rec)
            techniques[rec.technique] = techniques.get(rec.technique, 0) + 1
            sample_count += len(rec.samples)

    write_traces(records, out_path)
    return ImportReport(
        record_count=len(records),
        sample_count=sample_count,
        techniques=techniques,
        unique_words=len({r.word for r in records}),
        skipped=skipped,
    )


def _frame_converter(frame: str, manifest: dict, layout: KeyboardLayout | None):
    if frame == "mm":
        return lambda x, y: (x, y)
    if frame == "normalized":
        if layout is None:
            raise DataFormatError("normalized-frame dataset needs a layout to convert")
        return lambda x, y: tuple(map(float, layout.denormalize((x, y))))
    if frame == "px":
        scale = float(manifest["px_per_mm"])
        ox, oy = manifest.get("origin_px", (0.0, 0.0))
        return lambda x, y: ((x - ox) / scale, (y - oy) / scale)
    raise DataFormatError(f"unknown coordinate frame {frame!r}")


def _convert_record(d: dict, line_no: int, to_mm) -> TraceRecord:
    gaze = d["gaze"]
    samples = []
    for row in gaze:
        t, x, y = float(row[0]), float(row[1]), float(row[2])
        valid = bool(row[3]) if len(row) > 3 else True
        x, y = to_mm(x, y)
        samples.append(GazeSample(t, x, y, valid=valid))
    hits = d.get("hits")
    meta = {k: v for k, v in d.items() if k not in CORE_RECORD_KEYS | {"technique", "context", "hits", "record_id"}}
    return TraceRecord(
        record_id=str(d.get("record_id", f"import-{line_no:06d}")),
        technique=str(d.get("technique", "unknown")),
        word=d["word"],
        samples=samples,
        context=d.get("context", ""),
        hit_points=[tuple(to_mm(float(p[0]), float(p[1]))) for p in hits] if hits else None,
        meta=meta,
    )


# -- bundled data discovery ---------------------------------------------------

ENV_DATA_DIR = "SWIPE_DECODE_DATA"


def default_data_dir() -> Path:
    """Data directory: $SWIPE_DECODE_DATA if set, else the packaged assets."""
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        p = Path(env)
        if not p.is_dir():
            raise DataFormatError(f"{ENV_DATA_DIR} points to a missing directory: {p}")
        return p
    return Path(str(resources.files("gazeswipe") / "data"))


@dataclass
class Assets:
    """Everything a decoder or service needs, loaded once."""

    layout: KeyboardLayout
    lexicon: Lexicon
    word_model: WordNgramModel
    char_model: CharNgramModel


def load_assets(
    layout_path: str | Path | None = None,
    lexicon_path: str | Path | None = None,
    ngrams_path: str | Path | None = None,
) -> Assets:
    """Load layout/lexicon/LM, falling back to the bundled defaults per file."""
    base = default_data_dir()
    layout = load_layout(layout_path or base / "layout.json")
    lexicon = Lexicon.from_tsv(lexicon_path or base / "lexicon.tsv")
    ng = Path(ngrams_path) if ngrams_path else base / "ngrams.tsv"
    if ng.exists():
        word_model = WordNgramModel.load_bigrams(lexicon, ng)
    else:
        word_model = WordNgramModel(lexicon)
    char_model = CharNgramModel.from_words(lexicon.entries)
    return Assets(layout, lexicon, word_model, char_model)
