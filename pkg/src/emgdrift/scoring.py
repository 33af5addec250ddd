"""Rolling-reference Mahalanobis scoring of slope vectors.

A FIFO of recent slope vectors defines the "current" distribution; each
incoming vector is scored against it before being inserted, so a point
never contributes to its own reference.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ParameterError, ToolkitError
from .gaussian import fit_gaussian
from .preprocess import SlopeStream

__all__ = ["ScorePoint", "RollingReference", "score_stream"]


@dataclass(frozen=True)
class ScorePoint:
    """Mahalanobis distance of one slope vector to the rolling reference."""

    score: float
    window_index: int
    t_seconds: float
    degenerate: bool = False


class RollingReference:
    """Single-owner scorer holding the last `capacity` slope vectors.

    Scoring starts once the buffer holds at least d + 2 vectors; before
    that update() returns None (warm-up).
    """

    def __init__(self, capacity: int = 30, ridge: float | str = "auto"):
        if capacity < 3:
            raise ParameterError("capacity must be at least 3")
        self.capacity = capacity
        self.ridge = ridge
        self._buffer: deque[np.ndarray] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._buffer)

    def ready(self, dim: int) -> bool:
        return len(self._buffer) >= dim + 2

    def update(self, x, window_index: int = 0, t_seconds: float = 0.0) -> ScorePoint | None:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ToolkitError("slope vector must be 1-D")
        if not np.isfinite(x).all():
            raise ToolkitError(f"non-finite slope vector at window {window_index}")
        if self._buffer and x.shape[0] != self._buffer[0].shape[0]:
            raise ToolkitError("slope vector dimension changed mid-stream")
        point = None
        if self.ready(x.shape[0]):
            model = fit_gaussian(np.asarray(self._buffer), ridge=self.ridge)
            y = solve_triangular(model.chol, x - model.mean, lower=True)
            point = ScorePoint(
                score=float(np.sqrt(y @ y)),
                window_index=window_index,
                t_seconds=t_seconds,
                degenerate=model.degenerate,
            )
        self._buffer.append(x)
        return point


def score_stream(
    slopes: SlopeStream, capacity: int = 30, ridge: float | str = "auto"
) -> list[ScorePoint]:
    """Run the rolling scorer over a whole slope stream."""
    ref = RollingReference(capacity=capacity, ridge=ridge)
    points = []
    for i in range(len(slopes)):
        point = ref.update(slopes.values[i], window_index=i, t_seconds=float(slopes.times[i]))
        if point is not None:
            points.append(point)
    return points


def write_score_csv(points: list[ScorePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "t_seconds", "score", "degenerate"])
        for p in points:
            writer.writerow([p.window_index, repr(p.t_seconds), repr(p.score), int(p.degenerate)])


def read_score_csv(path) -> list[ScorePoint]:
    from .errors import ParseError, SchemaError

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["window", "t_seconds", "score", "degenerate"]:
            raise SchemaError(f"{path}: expected header 'window,t_seconds,score,degenerate'")
        points = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                points.append(
                    ScorePoint(
                        score=float(row[2]),
                        window_index=int(row[0]),
                        t_seconds=float(row[1]),
                        degenerate=bool(int(row[3])),
                    )
                )
            except ValueError:
                raise ParseError(f"{path}: row {row_no}: non-numeric cell") from None
    return points
