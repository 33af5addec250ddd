"""Ground-truth matching, F1 / average detection delay, synthetic stream
generation, and the end-to-end experiment runner.

A detection matches the earliest unmatched truth within a window of W
seconds after it; unmatched detections count as false positives and
unmatched truths as misses.  The runner executes the full unsupervised
pipeline per (grasp, detector) pair and emits one report row each.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .detectors import DETECTOR_KINDS, DetectorConfig, detect_series
from .errors import ParameterError, SchemaError, ToolkitError
from .preprocess import rms_extract, slope_features
from .scoring import score_stream
from .stream import (
    GroundTruth,
    SignalStream,
    Timeline,
    concat_domains,
    drop_zero_channels,
    filter_grasp,
    load_signal_csv,
    sort_domains,
)

__all__ = [
    "MatchResult",
    "match_detections",
    "f1_score",
    "add_seconds",
    "SynthSpec",
    "SynthSegment",
    "synth_generate",
    "ReportRow",
    "run_experiment",
    "report_to_csv",
]


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    delays_seconds: tuple[float, ...]

    def __post_init__(self):
        if len(self.delays_seconds) != self.tp:
            raise ToolkitError("one delay per true positive required")


def match_detections(truths: GroundTruth, detections, window_seconds: float = 10.0) -> MatchResult:
    """Greedy earliest-first matching of detections to ground truth.

    Each truth t* consumes the earliest unmatched detection d with
    t* <= d <= t* + W; later detections inside the same window are false
    positives.
    """
    if window_seconds <= 0:
        raise ParameterError("parameter 'window_seconds' must be > 0")
    truth_times = sorted(truths.boundaries)
    detection_times = sorted(float(d) for d in detections)
    matched = [False] * len(detection_times)
    delays = []
    start = 0
    for t in truth_times:
        for i in range(start, len(detection_times)):
            d = detection_times[i]
            if matched[i] or d < t:
                continue
            if d > t + window_seconds:
                break
            matched[i] = True
            delays.append(d - t)
            start = i + 1
            break
    tp = len(delays)
    return MatchResult(
        tp=tp,
        fp=len(detection_times) - tp,
        fn=len(truth_times) - tp,
        delays_seconds=tuple(delays),
    )


def f1_score(match: MatchResult) -> float:
    denom = 2 * match.tp + match.fp + match.fn
    if denom == 0:
        return 0.0
    return 2.0 * match.tp / denom


def add_seconds(match: MatchResult) -> float | None:
    """Average detection delay; None when nothing was detected."""
    if match.tp == 0:
        return None
    return float(np.mean(match.delays_seconds))


@dataclass(frozen=True)
class SynthSegment:
    mean: tuple[float, ...]
    cov: tuple[tuple[float, ...], ...]
    duration: int


@dataclass(frozen=True)
class SynthSpec:
    segments: tuple[SynthSegment, ...]
    transition: str = "abrupt"  # "abrupt" | "gradual"
    width: int = 0
    seed: int = 0

    def __post_init__(self):
        if not self.segments:
            raise ParameterError("parameter 'segments' must be non-empty")
        if self.transition not in ("abrupt", "gradual"):
            raise ParameterError("parameter 'transition' must be 'abrupt' or 'gradual'")
        if self.width < 0:
            raise ParameterError("parameter 'width' must be >= 0")
        for seg in self.segments:
            if seg.duration <= 0:
                raise ParameterError("parameter 'duration' must be > 0")
            if self.transition == "gradual" and self.width >= seg.duration:
                raise ParameterError("parameter 'width' must be below every segment duration")


def synth_generate(spec: SynthSpec) -> tuple[np.ndarray, GroundTruth]:
    """Draw an i.i.d. Gaussian vector stream per segment.

    Gradual transitions blend the mean linearly over `width` samples at
    the start of each new segment; the draws themselves are identical to
    the abrupt case, so width=0 reproduces it bitwise.
    """
    rng = np.random.default_rng(spec.seed)
    d = len(spec.segments[0].mean)
    chunks = []
    boundaries = []
    total = 0
    previous_mean = None
    for seg in spec.segments:
        mean = np.asarray(seg.mean, dtype=float)
        cov = np.asarray(seg.cov, dtype=float)
        if mean.shape != (d,) or cov.shape != (d, d):
            raise ParameterError("parameter 'segments' must share one dimension")
        try:
            draws = rng.multivariate_normal(
                np.zeros(d), cov, size=seg.duration, method="cholesky"
            )
        except np.linalg.LinAlgError:
            raise ParameterError("parameter 'cov' must be positive definite") from None
        means = np.tile(mean, (seg.duration, 1))
        if spec.transition == "gradual" and spec.width > 0 and previous_mean is not None:
            ramp = np.linspace(0.0, 1.0, spec.width + 1)[1:, None]
            means[: spec.width] = previous_mean + ramp * (mean - previous_mean)
        chunks.append(draws + means)
        if total > 0:
            boundaries.append(total)
        total += seg.duration
        previous_mean = mean
    stream = np.concatenate(chunks, axis=0)
    return stream, GroundTruth(boundaries=tuple(float(b) for b in boundaries))


@dataclass(frozen=True)
class ReportRow:
    detector: str
    grasp: int
    tp: int
    fp: int
    fn: int
    f1: float
    add_seconds: float | None


def report_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["detector", "grasp", "tp", "fp", "fn", "f1", "add_seconds"])
    for r in rows:
        add = "--" if r.add_seconds is None else f"{r.add_seconds:.6f}"
        writer.writerow([r.detector, r.grasp, r.tp, r.fp, r.fn, f"{r.f1:.6f}", add])
    return buf.getvalue()


_TOP_KEYS = {"seed", "inputs", "timeline", "scoring", "detectors", "matching"}
_INPUT_KEYS = {"kind", "paths", "sample_rate_hz", "grasps", "segments", "transition", "width"}
_TIMELINE_KEYS = {"rms_window_ms", "rms_stride_ms", "slope_window_frames", "slope_stride_frames"}
_SCORING_KEYS = {"capacity", "ridge"}
_MATCHING_KEYS = {"window_seconds"}


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise SchemaError(f"unknown config key '{sorted(unknown)[0]}' in {where}")


@dataclass(frozen=True)
class StageError:
    """Failure of one (grasp, detector) job; other jobs continue."""

    grasp: int
    detector: str
    stage: str
    message: str


def _per_grasp_stream(config: dict, grasp: int, seed: int) -> tuple[SignalStream, GroundTruth]:
    inputs = config["inputs"]
    fs = float(inputs["sample_rate_hz"])
    if inputs["kind"] == "synth":
        spec = SynthSpec(
            segments=tuple(
                SynthSegment(
                    mean=tuple(seg["mean"]),
                    cov=tuple(tuple(row) for row in seg["cov"]),
                    duration=int(seg["duration"]),
                )
                for seg in inputs["segments"]
            ),
            transition=inputs.get("transition", "abrupt"),
            width=int(inputs.get("width", 0)),
            # one independent substream per grasp
            seed=seed * 1000 + grasp,
        )
        vectors, truth_samples = synth_generate(spec)
        n = vectors.shape[0]
        period = np.zeros(n, dtype=np.int64)
        offsets = [0] + [int(b) for b in truth_samples.boundaries] + [n]
        for i in range(len(offsets) - 1):
            period[offsets[i] : offsets[i + 1]] = i + 1
        stream = SignalStream(
            values=vectors,
            subject=np.zeros(n, dtype=np.int64),
            period=period,
            grasp=np.full(n, grasp, dtype=np.int64),
            sample_rate_hz=fs,
        )
        truth = GroundTruth(boundaries=tuple(b / fs for b in truth_samples.boundaries))
        return stream, truth
    if inputs["kind"] == "csv":
        domains = [load_signal_csv(p, fs) for p in inputs["paths"]]
        domains = sort_domains(domains)
        filtered = [filter_grasp(s, grasp) for s in domains]
        filtered = [s for s in filtered if len(s) > 0]
        if not filtered:
            raise ToolkitError(f"grasp {grasp} absent from every input file")
        stream, truth = concat_domains(filtered)
        stream, _ = drop_zero_channels(stream)
        return stream, truth
    raise SchemaError(f"unknown config key value '{inputs['kind']}' for inputs.kind")


def run_experiment(config: dict) -> tuple[list[ReportRow], list[StageError]]:
    """Execute the full pipeline per (grasp, detector) pair.

    The run is unsupervised: grasp/domain labels shape the streams and
    the ground truth but never reach the detectors.  Returns report rows
    sorted by (grasp, detector) plus any per-pair stage errors.
    """
    _reject_unknown(config, _TOP_KEYS, "config")
    if "inputs" not in config:
        raise SchemaError("config requires an 'inputs' section")
    _reject_unknown(config["inputs"], _INPUT_KEYS, "inputs")
    timeline_cfg = config.get("timeline", {})
    _reject_unknown(timeline_cfg, _TIMELINE_KEYS, "timeline")
    scoring_cfg = config.get("scoring", {})
    _reject_unknown(scoring_cfg, _SCORING_KEYS, "scoring")
    matching_cfg = config.get("matching", {})
    _reject_unknown(matching_cfg, _MATCHING_KEYS, "matching")
    seed = int(config.get("seed", 0))
    grasps = [int(g) for g in config["inputs"].get("grasps", [1])]
    detector_cfgs = []
    spec_list = config.get("detectors", "all")
    if spec_list == "all":
        detector_cfgs = [DetectorConfig(kind=k) for k in DETECTOR_KINDS]
    else:
        for item in spec_list:
            detector_cfgs.append(DetectorConfig(kind=item["kind"], params=item.get("params", {})))
    window_seconds = float(matching_cfg.get("window_seconds", 10.0))

    rows: list[ReportRow] = []
    errors: list[StageError] = []
    for grasp in grasps:
        try:
            signal, truth = _per_grasp_stream(config, grasp, seed)
            timeline = Timeline(sample_rate_hz=signal.sample_rate_hz, **timeline_cfg)
            frames = rms_extract(signal, timeline)
            slopes = slope_features(frames, timeline)
            scores = score_stream(
                slopes,
                capacity=int(scoring_cfg.get("capacity", 30)),
                ridge=scoring_cfg.get("ridge", "auto"),
            )
        except ToolkitError as exc:
            for cfg in detector_cfgs:
                errors.append(StageError(grasp, cfg.kind, "pipeline", str(exc)))
            continue
        for cfg in detector_cfgs:
            try:
                events = detect_series(cfg, scores)
                drift_times = [e.t_seconds for e in events if e.kind == "drift"]
                match = match_detections(truth, drift_times, window_seconds)
                rows.append(
                    ReportRow(
                        detector=cfg.kind,
                        grasp=grasp,
                        tp=match.tp,
                        fp=match.fp,
                        fn=match.fn,
                        f1=f1_score(match),
                        add_seconds=add_seconds(match),
                    )
                )
            except ToolkitError as exc:
                errors.append(StageError(grasp, cfg.kind, "detect", str(exc)))
    rows.sort(key=lambda r: (r.grasp, r.detector))
    return rows, errors
