"""Raw signal data model, CSV ingestion and domain-stream construction.

A "domain" is one (subject, period) recording session.  Sessions are
concatenated in ascending (subject, period) order to form the evaluation
stream; each junction becomes a ground-truth change point.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInputError,
    ParseError,
    SchemaError,
)

__all__ = [
    "Sample",
    "SignalStream",
    "Timeline",
    "GroundTruth",
    "load_signal_csv",
    "write_signal_csv",
    "load_ground_truth_csv",
    "write_ground_truth_csv",
    "drop_zero_channels",
    "concat_domains",
    "filter_grasp",
]


@dataclass(frozen=True)
class Sample:
    """One multi-channel reading with its domain labels."""

    channels: np.ndarray
    subject: int
    period: int
    grasp: int
    index: int


@dataclass(frozen=True)
class SignalStream:
    """Column-oriented store for a labelled multi-channel recording.

    values has shape (n_samples, n_channels); subject/period/grasp are
    per-sample integer label arrays of length n_samples.
    """

    values: np.ndarray
    subject: np.ndarray
    period: np.ndarray
    grasp: np.ndarray
    sample_rate_hz: float
    channel_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise SchemaError("signal values must be a 2-D array")
        object.__setattr__(self, "values", values)
        for name in ("subject", "period", "grasp"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.shape != (values.shape[0],):
                raise SchemaError(f"{name} labels must have one entry per sample")
            object.__setattr__(self, name, arr)
        if not self.sample_rate_hz > 0:
            raise SchemaError("sample_rate_hz must be positive")
        if not self.channel_names:
            names = tuple(f"emg_{i + 1}" for i in range(values.shape[1]))
            object.__setattr__(self, "channel_names", names)
        elif len(self.channel_names) != values.shape[1]:
            raise SchemaError("channel_names length must match channel count")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate_hz

    def sample(self, i: int) -> Sample:
        return Sample(
            channels=self.values[i],
            subject=int(self.subject[i]),
            period=int(self.period[i]),
            grasp=int(self.grasp[i]),
            index=i,
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self.sample(i)


@dataclass(frozen=True)
class Timeline:
    """Window geometry shared by every stage of the pipeline.

    Converts frame/window indices at each granularity back to seconds.
    Window-end convention: the timestamp of a frame or window is the time
    of its last raw sample.
    """

    sample_rate_hz: float
    rms_window_ms: float = 200.0
    rms_stride_ms: float = 20.0
    slope_window_frames: int = 1500
    slope_stride_frames: int = 500

    def __post_init__(self):
        for name in (
            "sample_rate_hz",
            "rms_window_ms",
            "rms_stride_ms",
            "slope_window_frames",
            "slope_stride_frames",
        ):
            if not getattr(self, name) > 0:
                raise SchemaError(f"timeline parameter {name} must be positive")
        if self.rms_window_ms < self.rms_stride_ms:
            raise SchemaError("rms window must be >= stride")
        if self.slope_window_frames < self.slope_stride_frames:
            raise SchemaError("slope window must be >= stride")

    @property
    def rms_window_samples(self) -> int:
        return max(1, round(self.rms_window_ms * self.sample_rate_hz / 1000.0))

    @property
    def rms_stride_samples(self) -> int:
        return max(1, round(self.rms_stride_ms * self.sample_rate_hz / 1000.0))

    def rms_frame_time(self, frame_index) -> float:
        """Window-end time in seconds of an RMS frame."""
        i = np.asarray(frame_index)
        t = (i * self.rms_stride_samples + self.rms_window_samples) / self.sample_rate_hz
        return float(t) if t.ndim == 0 else t

    def slope_window_time(self, window_index) -> float:
        """Time of the last RMS frame inside a slope window."""
        j = np.asarray(window_index)
        last_frame = j * self.slope_stride_frames + self.slope_window_frames - 1
        t = self.rms_frame_time(last_frame)
        return float(t) if np.ndim(t) == 0 else t


@dataclass(frozen=True)
class GroundTruth:
    """Sorted change-point times, in seconds."""

    boundaries: tuple[float, ...] = ()

    def __post_init__(self):
        b = tuple(float(t) for t in self.boundaries)
        if any(t < 0 for t in b):
            raise SchemaError("ground-truth boundaries must be >= 0")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise SchemaError("ground-truth boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)

    def __len__(self) -> int:
        return len(self.boundaries)


_LABEL_COLUMNS = ("subject", "period", "grasp")


def load_signal_csv(path, sample_rate_hz: float) -> SignalStream:
    """Read the raw schema ``t,emg_1..emg_K,subject,period,grasp``.

    The sample rate is not stored in the file and must be supplied.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "t":
            raise SchemaError(f"{path}: first column must be 't'")
        for required in _LABEL_COLUMNS:
            if required not in header:
                raise SchemaError(f"{path}: missing required column '{required}'")
        channel_names = [h for h in header[1:] if h.startswith("emg_")]
        if not channel_names:
            raise SchemaError(f"{path}: missing required column 'emg_*'")
        expected = ["t"] + channel_names + list(_LABEL_COLUMNS)
        if header != expected:
            raise SchemaError(
                f"{path}: header must be {','.join(expected)}, got {','.join(header)}"
            )
        k = len(channel_names)
        values, subject, period, grasp = [], [], [], []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: row {row_no}: expected {len(header)} cells")
            try:
                values.append([float(c) for c in row[1 : 1 + k]])
                subject.append(int(row[1 + k]))
                period.append(int(row[2 + k]))
                grasp.append(int(row[3 + k]))
            except ValueError as exc:
                raise ParseError(f"{path}: row {row_no}: non-numeric cell ({exc})") from None
    return SignalStream(
        values=np.asarray(values, dtype=float).reshape(len(values), k),
        subject=np.asarray(subject, dtype=np.int64),
        period=np.asarray(period, dtype=np.int64),
        grasp=np.asarray(grasp, dtype=np.int64),
        sample_rate_hz=float(sample_rate_hz),
        channel_names=tuple(channel_names),
    )


def write_signal_csv(stream: SignalStream, path) -> None:
    """Write the raw schema; values use shortest exact decimal text."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *stream.channel_names, *_LABEL_COLUMNS])
        fs = stream.sample_rate_hz
        for i in range(len(stream)):
            writer.writerow(
                [f"{i / fs:.6f}"]
                + [repr(float(v)) for v in stream.values[i]]
                + [int(stream.subject[i]), int(stream.period[i]), int(stream.grasp[i])]
            )


def load_ground_truth_csv(path) -> GroundTruth:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_seconds"]:
            raise SchemaError(f"{path}: ground-truth header must be 't_seconds'")
        times = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[0]))
            except ValueError:
                raise ParseError(f"{path}: row {row_no}: non-numeric time") from None
    return GroundTruth(boundaries=tuple(times))


def write_ground_truth_csv(truth: GroundTruth, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_seconds"])
        for t in truth.boundaries:
            writer.writerow([repr(float(t))])


def drop_zero_channels(stream: SignalStream) -> tuple[SignalStream, list[int]]:
    """Remove channels whose values are all exactly zero.

    Returns the reduced stream and the 1-based indices of dropped
    channels (DB6 recordings carry two such dead columns).
    """
    if len(stream) == 0:
        raise DegenerateInputError("cannot scan channels of an empty stream")
    zero = np.all(stream.values == 0.0, axis=0)
    if zero.all():
        raise DegenerateInputError("all channels are zero; no signal to process")
    dropped = [int(i) + 1 for i in np.flatnonzero(zero)]
    if not dropped:
        return stream, []
    keep = ~zero
    return (
        SignalStream(
            values=stream.values[:, keep],
            subject=stream.subject,
            period=stream.period,
            grasp=stream.grasp,
            sample_rate_hz=stream.sample_rate_hz,
            channel_names=tuple(n for n, k in zip(stream.channel_names, keep) if k),
        ),
        dropped,
    )


def concat_domains(streams: list[SignalStream]) -> tuple[SignalStream, GroundTruth]:
    """Concatenate session streams and record one boundary per junction.

    Streams must already be in the desired order (ascending
    (subject, period) by convention); boundaries are timestamped as
    cumulative-sample-count / fs.
    """
    if not streams:
        raise DegenerateInputError("concat_domains requires at least one stream")
    k = streams[0].n_channels
    fs = streams[0].sample_rate_hz
    for s in streams[1:]:
        if s.n_channels != k:
            raise SchemaError("all streams must share the same channel count")
        if s.sample_rate_hz != fs:
            raise SchemaError("all streams must share the same sample rate")
    boundaries = []
    total = 0
    for s in streams[:-1]:
        total += len(s)
        boundaries.append(total / fs)
    return (
        SignalStream(
            values=np.concatenate([s.values for s in streams], axis=0),
            subject=np.concatenate([s.subject for s in streams]),
            period=np.concatenate([s.period for s in streams]),
            grasp=np.concatenate([s.grasp for s in streams]),
            sample_rate_hz=fs,
            channel_names=streams[0].channel_names,
        ),
        GroundTruth(boundaries=tuple(boundaries)),
    )


def sort_domains(streams: list[SignalStream]) -> list[SignalStream]:
    """Order session streams by (subject, period) of their first sample."""
    def key(s: SignalStream):
        if len(s) == 0:
            return (0, 0)
        return (int(s.subject[0]), int(s.period[0]))

    return sorted(streams, key=key)


def filter_grasp(stream: SignalStream, grasp: int) -> SignalStream:
    """Keep only samples carrying the given grasp label, order preserved."""
    keep = stream.grasp == grasp
    if not keep.any():
        warnings.warn(f"grasp label {grasp} not present; result is empty", stacklevel=2)
    return SignalStream(
        values=stream.values[keep],
        subject=stream.subject[keep],
        period=stream.period[keep],
        grasp=stream.grasp[keep],
        sample_rate_hz=stream.sample_rate_hz,
        channel_names=stream.channel_names,
    )
