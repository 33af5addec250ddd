"""Sliding-window RMS features and per-window least-squares slopes.

Stages 1-3 of the streaming pipeline: raw signal -> RMS frames
(200 ms / 20 ms by default) -> per-channel regression slopes over
1500-frame windows advancing by 500 frames.
"""

from __future__ import annotations

import csv
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ParseError, SchemaError
from .stream import SignalStream, Timeline

__all__ = [
    "RmsFrame",
    "SlopeVector",
    "RmsStream",
    "SlopeStream",
    "rms_extract",
    "slope_features",
    "StreamingRms",
    "StreamingSlope",
]


@dataclass(frozen=True)
class RmsFrame:
    """Per-channel RMS over one raw-signal window, stamped at window end."""

    values: np.ndarray
    frame_index: int
    t_seconds: float


@dataclass(frozen=True)
class SlopeVector:
    """Per-channel OLS slope over one window of RMS frames."""

    slopes: np.ndarray
    window_index: int
    t_seconds: float


@dataclass(frozen=True)
class RmsStream:
    """Column store of RMS frames; values has shape (n_frames, n_channels)."""

    values: np.ndarray
    times: np.ndarray
    timeline: Timeline

    def __len__(self) -> int:
        return self.values.shape[0]

    def frame(self, i: int) -> RmsFrame:
        return RmsFrame(values=self.values[i], frame_index=i, t_seconds=float(self.times[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self.frame(i)


@dataclass(frozen=True)
class SlopeStream:
    """Column store of slope vectors; values has shape (n_windows, n_channels)."""

    values: np.ndarray
    times: np.ndarray
    timeline: Timeline

    def __len__(self) -> int:
        return self.values.shape[0]

    def window(self, i: int) -> SlopeVector:
        return SlopeVector(slopes=self.values[i], window_index=i, t_seconds=float(self.times[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self.window(i)


def rms_extract(stream: SignalStream, timeline: Timeline) -> RmsStream:
    """Per-channel sliding-window RMS; trailing partial windows are dropped."""
    w = timeline.rms_window_samples
    s = timeline.rms_stride_samples
    n = len(stream)
    if n < w:
        warnings.warn(f"stream of {n} samples is shorter than one {w}-sample window", stacklevel=2)
        return RmsStream(
            values=np.empty((0, stream.n_channels)),
            times=np.empty(0),
            timeline=timeline,
        )
    windows = sliding_window_view(stream.values, w, axis=0)[::s]  # (m, k, w)
    values = np.sqrt(np.mean(windows**2, axis=2))
    m = values.shape[0]
    return RmsStream(values=values, times=timeline.rms_frame_time(np.arange(m)), timeline=timeline)


def _slope_weights(length: int) -> np.ndarray:
    # OLS slope over abscissa k = 0..length-1 is a fixed linear functional:
    # b = sum((k - kbar) * y) / sum((k - kbar)^2)
    k = np.arange(length, dtype=float)
    centered = k - k.mean()
    return centered / np.sum(centered**2)


def slope_features(frames: RmsStream, timeline: Timeline) -> SlopeStream:
    """Per-channel least-squares slope over each window of RMS frames."""
    w = timeline.slope_window_frames
    s = timeline.slope_stride_frames
    n = len(frames)
    if n < w:
        warnings.warn(f"{n} frames is fewer than one {w}-frame slope window", stacklevel=2)
        return SlopeStream(
            values=np.empty((0, frames.values.shape[1])),
            times=np.empty(0),
            timeline=timeline,
        )
    windows = sliding_window_view(frames.values, w, axis=0)[::s]  # (m, k, w)
    slopes = windows @ _slope_weights(w)
    m = slopes.shape[0]
    return SlopeStream(
        values=slopes,
        times=timeline.slope_window_time(np.arange(m)),
        timeline=timeline,
    )


class StreamingRms:
    """Incremental RMS extractor over a ring buffer of raw samples.

    Single-owner state machine; push one sample at a time, frames are
    emitted as their windows complete.  Matches rms_extract on the same
    data.
    """

    def __init__(self, timeline: Timeline, n_channels: int):
        self.timeline = timeline
        self.n_channels = n_channels
        self._buffer = deque(maxlen=timeline.rms_window_samples)
        self._count = 0
        self._next_frame = 0

    def push(self, sample: np.ndarray) -> RmsFrame | None:
        self._buffer.append(np.asarray(sample, dtype=float))
        self._count += 1
        w = self.timeline.rms_window_samples
        s = self.timeline.rms_stride_samples
        if self._count < w or (self._count - w) % s != 0:
            return None
        window = np.asarray(self._buffer)  # (w, k)
        frame = RmsFrame(
            values=np.sqrt(np.mean(window**2, axis=0)),
            frame_index=self._next_frame,
            t_seconds=self.timeline.rms_frame_time(self._next_frame),
        )
        self._next_frame += 1
        return frame


class StreamingSlope:
    """Incremental slope extractor over a ring buffer of RMS frames."""

    def __init__(self, timeline: Timeline, n_channels: int):
        self.timeline = timeline
        self.n_channels = n_channels
        self._buffer = deque(maxlen=timeline.slope_window_frames)
        self._count = 0
        self._next_window = 0
        self._weights = _slope_weights(timeline.slope_window_frames)

    def push(self, rms_values: np.ndarray) -> SlopeVector | None:
        self._buffer.append(np.asarray(rms_values, dtype=float))
        self._count += 1
        w = self.timeline.slope_window_frames
        s = self.timeline.slope_stride_frames
        if self._count < w or (self._count - w) % s != 0:
            return None
        window = np.asarray(self._buffer)  # (w, k)
        vec = SlopeVector(
            slopes=self._weights @ window,
            window_index=self._next_window,
            t_seconds=self.timeline.slope_window_time(self._next_window),
        )
        self._next_window += 1
        return vec


def write_rms_csv(frames: RmsStream, path) -> None:
    k = frames.values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "t_seconds"] + [f"rms_{i + 1}" for i in range(k)])
        for i in range(len(frames)):
            writer.writerow([i, repr(float(frames.times[i]))] + [repr(float(v)) for v in frames.values[i]])


def write_slope_csv(slopes: SlopeStream, path) -> None:
    k = slopes.values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "t_seconds"] + [f"slope_{i + 1}" for i in range(k)])
        for i in range(len(slopes)):
            writer.writerow([i, repr(float(slopes.times[i]))] + [repr(float(v)) for v in slopes.values[i]])


def read_feature_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an index,t_seconds,feature... CSV; returns (times, values)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 3 or header[1].strip() != "t_seconds":
            raise SchemaError(f"{path}: expected header 'index,t_seconds,<features...>'")
        times, values = [], []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[1]))
                values.append([float(c) for c in row[2:]])
            except ValueError:
                raise ParseError(f"{path}: row {row_no}: non-numeric cell") from None
    return np.asarray(times), np.asarray(values, dtype=float).reshape(len(values), len(header) - 2)
