"""Command-line harness: decode, replay, sweep, synth, metrics, serve.

Exit codes: 0 success, 1 a --check assertion failed, 2 usage or I/O trouble.
All commands are deterministic given files, flags and seed; --json swaps the
human tables for machine-readable objects.
"""

from __future__ import annotations

import json
import re
import statistics
import sys
from pathlib import Path

import click

from . import dataio, metrics as metrics_mod
from .decoder import Decoder, DecoderConfig
from .session import TypingSession, replay_events
from .synth import SynthConfig, synth_traces
from .trace_pipeline import PipelineConfig, prune


def _fail(message: str, code: int = 2) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def config_options(fn):
    """Flags shared by every decoding command."""
    opts = [
        click.option("--layout", "layout_path", type=click.Path(), default=None, help="Layout JSON."),
        click.option("--lexicon", "lexicon_path", type=click.Path(), default=None, help="Lexicon TSV."),
        click.option("--ngrams", "ngrams_path", type=click.Path(), default=None, help="Word-bigram TSV."),
        click.option("--alpha", type=float, default=0.05, show_default=True, help="LM fusion weight."),
        click.option("--epsilon", type=float, default=1e-8, show_default=True, help="LM fusion floor."),
        click.option("--top-k", type=int, default=4, show_default=True, help="Candidates kept."),
        click.option("--ivt-threshold", type=float, default=100.0, show_default=True, help="Fixation velocity cut, deg/s."),
        click.option("--dbscan-eps", type=float, default=0.10, show_default=True, help="Cluster radius, keyboard widths."),
        click.option("--dbscan-min-pts", type=int, default=3, show_default=True, help="Cluster density floor."),
        click.option("--no-time-dim", is_flag=True, help="Drop the temporal coordinate (ablation)."),
        click.option("--no-pruning", is_flag=True, help="Match raw samples instead of centroids (ablation)."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build(kw) -> tuple[dataio.Assets, Decoder, PipelineConfig]:
    assets = dataio.load_assets(kw["layout_path"], kw["lexicon_path"], kw["ngrams_path"])
    dec_cfg = DecoderConfig(
        alpha=kw["alpha"],
        epsilon=kw["epsilon"],
        top_k=kw["top_k"],
        use_time_dim=not kw["no_time_dim"],
        use_pruning=not kw["no_pruning"],
    )
    pipe_cfg = PipelineConfig(
        ivt_threshold_deg_s=kw["ivt_threshold"],
        dbscan_eps=kw["dbscan_eps"],
        dbscan_min_pts=kw["dbscan_min_pts"],
    )
    decoder = Decoder(assets.lexicon, assets.word_model, assets.layout, dec_cfg)
    return assets, decoder, pipe_cfg


_CHECK_RE = re.compile(r"^\s*([a-z0-9_]+)\s*(<=|>=|<|>|==)\s*([-+0-9.eE]+)\s*$")


def _run_checks(report: dict, check: str | None) -> None:
    """--check 'top4>=90,mean_rt_ms<=10' against the report; exit 1 on miss."""
    if not check:
        return
    failures = []
    for clause in check.split(","):
        m = _CHECK_RE.match(clause)
        if not m:
            _fail(f"bad --check clause {clause!r}")
        key, op, want = m.group(1), m.group(2), float(m.group(3))
        if key not in report:
            _fail(f"--check key {key!r} not in report (have {sorted(report)})")
        have = float(report[key])
        ok = {
            "<=": have <= want,
            ">=": have >= want,
            "<": have < want,
            ">": have > want,
            "==": have == want,
        }[op]
        if not ok:
            failures.append(f"{key}={have:.4f} fails {clause.strip()}")
    if failures:
        for f in failures:
            click.echo(f"check failed: {f}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Gaze-swipe word decoding toolkit."""


# -- decode -------------------------------------------------------------------


@main.command()
@click.argument("trace_file", type=click.Path())
@click.argument("record_id")
@config_options
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def decode(trace_file, record_id, as_json, **kw):
    """Decode one record and print the ranked candidates."""
    try:
        records, _ = dataio.read_traces(trace_file)
    except (OSError, dataio.DataFormatError) as exc:
        _fail(str(exc))
    by_id = {r.record_id: r for r in records}
    if record_id not in by_id:
        _fail(f"record {record_id!r} not in {trace_file}")
    rec = by_id[record_id]
    assets, decoder, pipe_cfg = _build(kw)
    context = tuple(rec.context.split())
    if kw["no_pruning"]:
        ranking = decoder.decode_raw(rec.samples, context)
    else:
        ranking = decoder.decode(prune(rec.samples, pipe_cfg, assets.layout), context)

    payload = {
        "record_id": rec.record_id,
        "word": rec.word,
        "candidates": [
            {"word": c.word, "delta": c.dtw_distance, "p_dist": c.p_dist, "p_ng": c.p_ngram, "score": c.score}
            for c in ranking.candidates
        ],
        "latency_us": ranking.latency_us,
        "n_considered": ranking.n_considered,
        "fallback_used": ranking.fallback_used,
    }
    if as_json:
        click.echo(json.dumps(payload))
        return
    click.echo(f"record {rec.record_id} (intended: {rec.word})")
    click.echo(f"{'rank':<5}{'word':<16}{'delta':>10}{'p_dist':>9}{'p_ng':>11}{'score':>9}")
    for i, c in enumerate(ranking.candidates, start=1):
        click.echo(f"{i:<5}{c.word:<16}{c.dtw_distance:>10.4f}{c.p_dist:>9.4f}{c.p_ngram:>11.3e}{c.score:>9.4f}")
    click.echo(
        f"decoded in {ranking.latency_us:.0f} us over {ranking.n_considered} candidates"
        f"{' (prefix fallback)' if ranking.fallback_used else ''}"
    )


# -- replay -------------------------------------------------------------------


def _replay_report(records, decoder, pipe_cfg, layout, top_k, no_pruning) -> dict:
    per_tech: dict[str, list[tuple[int | None, float]]] = {}
    for rec in records:
        context = tuple(rec.context.split())
        if no_pruning:
            ranking = decoder.decode_raw(rec.samples, context)
        else:
            ranking = decoder.decode(prune(rec.samples, pipe_cfg, layout), context)
        words = ranking.words()
        rank = words.index(rec.word) + 1 if rec.word in words else None
        per_tech.setdefault(rec.technique, []).append((rank, ranking.latency_us))

    def agg(outcomes):
        ranks = [r for r, _ in outcomes]
        lats = [l for _, l in outcomes]
        return {
            "n": len(outcomes),
            "top1": 100.0 * sum(1 for r in ranks if r == 1) / len(ranks),
            f"top{top_k}": 100.0 * sum(1 for r in ranks if r is not None and r <= top_k) / len(ranks),
            "mean_rt_ms": statistics.fmean(lats) / 1000.0,
            "median_rt_ms": statistics.median(lats) / 1000.0,
        }

    all_outcomes = [o for outs in per_tech.values() for o in outs]
    report = agg(all_outcomes)
    report["techniques"] = {tech: agg(outs) for tech, outs in sorted(per_tech.items())}
    return report


@main.command()
@click.argument("trace_file", type=click.Path())
@config_options
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Write per-technique CSV here.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--check", default=None, help="Comma-separated assertions, e.g. 'top4>=90,mean_rt_ms<=10'.")
def replay(trace_file, csv_path, as_json, check, **kw):
    """Decode every record and report Top-1/Top-k accuracy and latency."""
    try:
        records, problems = dataio.read_traces(trace_file, lenient=True)
    except (OSError, dataio.DataFormatError) as exc:
        _fail(str(exc))
    for p in problems:
        click.echo(f"skipped {p}", err=True)
    if not records:
        _fail("no usable records")
    assets, decoder, pipe_cfg = _build(kw)
    report = _replay_report(records, decoder, pipe_cfg, assets.layout, kw["top_k"], kw["no_pruning"])

    if csv_path:
        k = kw["top_k"]
        lines = ["technique,n,top1,top{k},mean_rt_ms,median_rt_ms".format(k=k)]
        for tech, r in report["techniques"].items():
            lines.append(f"{tech},{r['n']},{r['top1']:.4f},{r[f'top{k}']:.4f},{r['mean_rt_ms']:.4f},{r['median_rt_ms']:.4f}")
        Path(csv_path).write_text("\n".join(lines) + "\n")

    if as_json:
        click.echo(json.dumps(report))
    else:
        k = kw["top_k"]
        click.echo(f"{'technique':<14}{'n':>6}{'top1%':>8}{f'top{k}%':>8}{'rt ms':>9}{'med ms':>9}")
        for tech, r in report["techniques"].items():
            click.echo(f"{tech:<14}{r['n']:>6}{r['top1']:>8.1f}{r[f'top{k}']:>8.1f}{r['mean_rt_ms']:>9.2f}{r['median_rt_ms']:>9.2f}")
        click.echo(f"{'overall':<14}{report['n']:>6}{report['top1']:>8.1f}{report[f'top{k}']:>8.1f}{report['mean_rt_ms']:>9.2f}{report['median_rt_ms']:>9.2f}")
    _run_checks(report, check)


# -- sweep --------------------------------------------------------------------


@main.command()
@click.argument("trace_file", type=click.Path())
@config_options
@click.option("--ivt-grid", default="50,100,150", show_default=True, help="Velocity thresholds, deg/s.")
@click.option("--eps-grid", default="0.05,0.10,0.15", show_default=True, help="Cluster radii.")
@click.option("--min-pts-grid", default="2,3,4,5,6", show_default=True, help="Density floors.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--check", default=None, help="Assertions on the grid summary, e.g. 'latency_spread<2'.")
def sweep(trace_file, ivt_grid, eps_grid, min_pts_grid, as_json, check, **kw):
    """Grid the pipeline hyperparameters and report accuracy/latency per cell."""
    try:
        records, _ = dataio.read_traces(trace_file, lenient=True)
    except (OSError, dataio.DataFormatError) as exc:
        _fail(str(exc))
    if not records:
        _fail("no usable records")
    assets, decoder, _ = _build(kw)
    try:
        thresholds = [float(v) for v in ivt_grid.split(",")]
        epses = [float(v) for v in eps_grid.split(",")]
        min_pts = [int(v) for v in min_pts_grid.split(",")]
    except ValueError as exc:
        _fail(f"bad grid: {exc}")

    rows = []
    for thr in thresholds:
        for eps in epses:
            for mp in min_pts:
                pipe_cfg = PipelineConfig(ivt_threshold_deg_s=thr, dbscan_eps=eps, dbscan_min_pts=mp)
                r = _replay_report(records, decoder, pipe_cfg, assets.layout, kw["top_k"], False)
                rows.append(
                    {
                        "ivt_threshold": thr,
                        "dbscan_eps": eps,
                        "dbscan_min_pts": mp,
                        "top1": r["top1"],
                        f"top{kw['top_k']}": r[f"top{kw['top_k']}"],
                        "mean_rt_ms": r["mean_rt_ms"],
                    }
                )

    lat = [row["mean_rt_ms"] for row in rows]
    summary = {
        "cells": len(rows),
        "min_mean_rt_ms": min(lat),
        "max_mean_rt_ms": max(lat),
        "latency_spread": max(lat) / min(lat) if min(lat) > 0 else float("inf"),
        "rows": rows,
    }
    if as_json:
        click.echo(json.dumps(summary))
    else:
        k = kw["top_k"]
        click.echo(f"{'ivt':>6}{'eps':>7}{'minpts':>8}{'top1%':>8}{f'top{k}%':>8}{'rt ms':>9}")
        for row in rows:
            click.echo(
                f"{row['ivt_threshold']:>6.0f}{row['dbscan_eps']:>7.2f}{row['dbscan_min_pts']:>8}"
                f"{row['top1']:>8.1f}{row[f'top{k}']:>8.1f}{row['mean_rt_ms']:>9.2f}"
            )
        click.echo(f"{len(rows)} cells, latency spread x{summary['latency_spread']:.2f}")
    _run_checks(summary, check)


# -- synth --------------------------------------------------------------------


@main.command()
@click.argument("out_file", type=click.Path())
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--dwell-ms", type=float, default=250.0, show_default=True)
@click.option("--saccade-speed", type=float, default=300.0, show_default=True, help="deg/s.")
@click.option("--jitter-sigma", type=float, default=0.0, show_default=True, help="Landing offset, key widths.")
@click.option("--tremor-mm", type=float, default=0.0, show_default=True)
@click.option("--drift-mm", type=float, default=0.0, show_default=True)
@click.option("--drift-fraction", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--layout", "layout_path", type=click.Path(), default=None)
@click.option("--lexicon", "lexicon_path", type=click.Path(), default=None)
def synth(out_file, count, dwell_ms, saccade_speed, jitter_sigma, tremor_mm, drift_mm, drift_fraction, seed, layout_path, lexicon_path):
    """Generate template-following synthetic traces (deterministic per seed)."""
    assets = dataio.load_assets(layout_path, lexicon_path, None)
    cfg = SynthConfig(
        dwell_ms=dwell_ms,
        saccade_speed_deg_s=saccade_speed,
        jitter_sigma_keyw=jitter_sigma,
        tremor_sigma_mm=tremor_mm,
        drift_mm=drift_mm,
        drift_fraction=drift_fraction,
    )
    records = synth_traces(assets.lexicon, assets.layout, cfg, count, seed=seed)
    dataio.write_traces(records, out_file)
    click.echo(f"wrote {len(records)} traces to {out_file}")


# -- metrics ------------------------------------------------------------------


@main.command("metrics")
@click.argument("session_log", type=click.Path())
@config_options
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def metrics_cmd(session_log, csv_path, as_json, **kw):
    """Replay a session event log and report WPM / TER / match rates."""
    try:
        events = dataio.read_session_events(session_log)
    except (OSError, dataio.DataFormatError) as exc:
        _fail(str(exc))
    if not events:
        _fail("empty session log")
    assets, decoder, pipe_cfg = _build(kw)

    def make_session():
        return TypingSession(decoder, assets.char_model, pipe_cfg, record=False)

    try:
        result = replay_events(events, make_session)
    except Exception as exc:  # protocol errors carry the offending event
        _fail(f"log does not replay: {exc}")

    trials = []
    for i, tr in enumerate(result.trials):
        presented_words = tr.presented.split()
        ranks: list[int | None] = []
        for j, commit in enumerate(tr.commits):
            intended = presented_words[j] if j < len(presented_words) else None
            if intended is None:
                ranks.append(None)
            else:
                ranks.append(commit.candidates.index(intended) + 1 if intended in commit.candidates else None)
        trials.append(
            metrics_mod.TrialRecord(
                trial_id=f"trial-{i:03d}",
                presented=tr.presented,
                transcribed=tr.final_text.strip(),
                duration_s=max(tr.duration_s, 1e-9),
                erased_chars=tr.erased_chars,
                candidate_ranks=ranks,
            )
        )

    summary = metrics_mod.summarize(trials, top_k=kw["top_k"])
    csv_text = metrics_mod.trial_csv_rows(trials, top_k=kw["top_k"])
    if csv_path:
        Path(csv_path).write_text(csv_text)
    if as_json:
        per_trial = [
            {
                "trial_id": t.trial_id,
                "presented": t.presented,
                "transcribed": t.transcribed,
                "wpm": t.wpm(),
                "ter": t.ter(),
                "erased_chars": t.erased_chars,
                "ranks": t.candidate_ranks,
            }
            for t in trials
        ]
        click.echo(json.dumps({"trials": per_trial, "summary": summary}))
    else:
        click.echo(csv_text.rstrip("\n"))
        click.echo(
            "summary: "
            + ", ".join(f"{k}={v:.4f}" for k, v in summary.items())
        )


# -- dataset import -------------------------------------------------------------


@main.command("import-dataset")
@click.argument("source_dir", type=click.Path())
@click.argument("out_file", type=click.Path())
@click.option("--layout", "layout_path", type=click.Path(), default=None)
def import_dataset_cmd(source_dir, out_file, layout_path):
    """Convert an external swipe dataset into the canonical trace format."""
    assets = dataio.load_assets(layout_path, None, None)
    try:
        report = dataio.import_dataset(source_dir, out_file, assets.layout)
    except dataio.DatasetNotFoundError as exc:
        _fail(str(exc))
    except dataio.DataFormatError as exc:
        _fail(str(exc))
    for s in report.skipped:
        click.echo(f"skipped {s}", err=True)
    click.echo(
        f"imported {report.record_count} records ({report.sample_count} samples, "
        f"{report.unique_words} unique words) into {out_file}"
    )
    for tech, n in sorted(report.techniques.items()):
        click.echo(f"  {tech}: {n}")


# -- serve --------------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--log-dir", type=click.Path(), default=None, help="Where per-connection event logs go.")
@click.option("--static-dir", type=click.Path(), default=None, help="Serve a built UI from this directory at /.")
@config_options
def serve(host, port, log_dir, static_dir, **kw):
    """Run the live demo service (HTTP + socket protocol)."""
    import uvicorn

    from .service import create_app

    assets, decoder, pipe_cfg = _build(kw)
    app = create_app(
        assets,
        decoder,
        pipe_cfg,
        log_dir=Path(log_dir) if log_dir else None,
        static_dir=Path(static_dir) if static_dir else None,
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
