"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 data/validation error, 2 usage error.  All
diagnostics go to stderr; data goes to the paths given by --output and
friends.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .detectors import DETECTOR_KINDS, DetectorConfig, detect_series, write_events_csv
from .errors import SchemaError, ToolkitError
from .evaluate import (
    SynthSegment,
    SynthSpec,
    add_seconds,
    f1_score,
    match_detections,
    report_to_csv,
    run_experiment,
    synth_generate,
)
from .gaussian import kl_profile
from .kpca import kpca_fit_project, separability_score, write_projection_csv
from .preprocess import (
    read_feature_csv,
    rms_extract,
    slope_features,
    write_rms_csv,
    write_slope_csv,
    RmsStream,
)
from .scoring import read_score_csv, score_stream, write_score_csv
from .stream import (
    GroundTruth,
    SignalStream,
    Timeline,
    load_ground_truth_csv,
    load_signal_csv,
    write_ground_truth_csv,
    write_signal_csv,
)


def _timeline_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rms-window-ms", type=float, default=200.0)
    parser.add_argument("--rms-stride-ms", type=float, default=20.0)
    parser.add_argument("--slope-window-frames", type=int, default=1500)
    parser.add_argument("--slope-stride-frames", type=int, default=500)


def _timeline_from(args, fs: float) -> Timeline:
    return Timeline(
        sample_rate_hz=fs,
        rms_window_ms=args.rms_window_ms,
        rms_stride_ms=args.rms_stride_ms,
        slope_window_frames=args.slope_window_frames,
        slope_stride_frames=args.slope_stride_frames,
    )


def _cmd_rms(args) -> int:
    stream = load_signal_csv(args.input, args.fs)
    frames = rms_extract(stream, _timeline_from(args, args.fs))
    write_rms_csv(frames, args.output)
    return 0


def _cmd_features(args) -> int:
    times, values = read_feature_csv(args.input)
    timeline = Timeline(
        sample_rate_hz=1.0,  # slope timestamps reuse the RMS t_seconds column
        slope_window_frames=args.slope_window_frames,
        slope_stride_frames=args.slope_stride_frames,
    )
    frames = RmsStream(values=values, times=times, timeline=timeline)
    slopes = slope_features(frames, timeline)
    # replace synthetic times with the actual end-frame timestamps
    w, s = args.slope_window_frames, args.slope_stride_frames
    end_times = times[np.arange(len(slopes)) * s + w - 1] if len(slopes) else times[:0]
    slopes = type(slopes)(values=slopes.values, times=end_times, timeline=timeline)
    write_slope_csv(slopes, args.output)
    return 0


def _cmd_score(args) -> int:
    times, values = read_feature_csv(args.input)
    from .preprocess import SlopeStream

    slopes = SlopeStream(values=values, times=times, timeline=Timeline(sample_rate_hz=1.0))
    ridge = "auto" if args.ridge == "auto" else float(args.ridge)
    points = score_stream(slopes, capacity=args.capacity, ridge=ridge)
    write_score_csv(points, args.output)
    return 0


def _cmd_kl(args) -> int:
    times, values = read_feature_csv(args.input)
    profile = kl_profile(
        values,
        ref_len=args.ref_len,
        window=args.window,
        step=args.step,
        reverse=args.reverse,
    )
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start_index", "t_seconds", "kl"])
        for start, kl in profile:
            writer.writerow([start, repr(float(times[start])), repr(kl)])
    return 0


def _cmd_kpca(args) -> int:
    with open(args.input, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or "label" not in header:
            raise SchemaError(f"{args.input}: kpca input requires a 'label' column")
        label_idx = header.index("label")
        skip = {i for i, h in enumerate(header) if h in ("frame", "window", "index", "t_seconds")}
        skip.add(label_idx)
        feature_idx = [i for i in range(len(header)) if i not in skip]
        rows, labels = [], []
        for row in reader:
            if not row:
                continue
            rows.append([float(row[i]) for i in feature_idx])
            labels.append(row[label_idx])
    x = np.asarray(rows, dtype=float)
    model, projections = kpca_fit_project(x, m=args.components)
    write_projection_csv(projections, labels, args.output)
    accuracy, _ = separability_score(projections, np.asarray(labels))
    print(f"accuracy={accuracy:.6f}")
    return 0


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise SchemaError(f"--param expects key=value, got '{pair}'")
        key, raw = pair.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        params[key] = value
    return params


def _cmd_detect(args) -> int:
    points = read_score_csv(args.input)
    config = DetectorConfig(kind=args.detector, params=_parse_params(args.param))
    events = detect_series(config, points)
    write_events_csv(events, args.output)
    return 0


def _cmd_synth(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    unknown = set(raw) - {"segments", "transition", "width", "seed", "sample_rate_hz"}
    if unknown:
        raise SchemaError(f"unknown config key '{sorted(unknown)[0]}' in synth spec")
    spec = SynthSpec(
        segments=tuple(
            SynthSegment(
                mean=tuple(seg["mean"]),
                cov=tuple(tuple(r) for r in seg["cov"]),
                duration=int(seg["duration"]),
            )
            for seg in raw["segments"]
        ),
        transition=raw.get("transition", "abrupt"),
        width=int(raw.get("width", 0)),
        seed=args.seed if args.seed is not None else int(raw.get("seed", 0)),
    )
    vectors, truth_samples = synth_generate(spec)
    fs = float(raw.get("sample_rate_hz", 1.0))
    n = vectors.shape[0]
    stream = SignalStream(
        values=vectors,
        subject=np.zeros(n, dtype=np.int64),
        period=np.ones(n, dtype=np.int64),
        grasp=np.ones(n, dtype=np.int64),
        sample_rate_hz=fs,
    )
    write_signal_csv(stream, args.output)
    truth = GroundTruth(boundaries=tuple(b / fs for b in truth_samples.boundaries))
    write_ground_truth_csv(truth, args.truth)
    return 0


def _cmd_eval(args) -> int:
    truth = load_ground_truth_csv(args.truths)
    detections = []
    with open(args.detections, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or "t_seconds" not in header:
            raise SchemaError(f"{args.detections}: expected a 't_seconds' column")
        t_idx = header.index("t_seconds")
        kind_idx = header.index("kind") if "kind" in header else None
        for row in reader:
            if not row:
                continue
            if kind_idx is not None and row[kind_idx] != "drift":
                continue
            detections.append(float(row[t_idx]))
    match = match_detections(truth, detections, args.window_seconds)
    add = add_seconds(match)
    print(
        f"tp={match.tp} fp={match.fp} fn={match.fn} "
        f"f1={f1_score(match):.6f} add_seconds={'--' if add is None else f'{add:.6f}'}"
    )
    return 0


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    if args.seed is not None:
        config["seed"] = args.seed
    rows, errors = run_experiment(config)
    for err in errors:
        print(f"error: grasp={err.grasp} detector={err.detector} stage={err.stage}: {err.message}",
              file=sys.stderr)
    text = report_to_csv(rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emgdrift",
        description="Streaming domain-shift detection for multi-channel EMG-like signals",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rms", help="raw CSV -> RMS feature CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--fs", type=float, required=True)
    _timeline_args(p)
    p.set_defaults(func=_cmd_rms)

    p = sub.add_parser("features", help="RMS CSV -> slope-vector CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--slope-window-frames", type=int, default=1500)
    p.add_argument("--slope-stride-frames", type=int, default=500)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("score", help="slope CSV -> rolling Mahalanobis score CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--capacity", type=int, default=30)
    p.add_argument("--ridge", default="auto")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("kl", help="feature CSV -> reference-based KL profile CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--ref-len", type=int, default=1600)
    p.add_argument("--window", type=int, default=1600)
    p.add_argument("--step", type=int, default=1600)
    p.add_argument("--reverse", action="store_true",
                   help="compute D(local || ref) instead of D(ref || local)")
    p.set_defaults(func=_cmd_kl)

    p = sub.add_parser("kpca", help="labelled feature CSV -> projections + separability")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--components", type=int, default=3)
    p.set_defaults(func=_cmd_kpca)

    p = sub.add_parser("detect", help="score CSV -> drift event CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--detector", required=True, choices=DETECTOR_KINDS)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("synth", help="synth spec JSON -> raw CSV + ground-truth CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("eval", help="events CSV + truths CSV -> metrics line")
    p.add_argument("--detections", required=True)
    p.add_argument("--truths", required=True)
    p.add_argument("--window-seconds", type=float, default=10.0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="experiment config JSON -> report CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
