import numpy as np
import pytest
from scipy.linalg import solve_triangular

from emgdrift.errors import ParameterError, ToolkitError
from emgdrift.gaussian import fit_gaussian
from emgdrift.preprocess import SlopeStream
from emgdrift.scoring import (
    RollingReference,
    read_score_csv,
    score_stream,
    write_score_csv,
)
from emgdrift.stream import Timeline


def make_slopes(values, fs=100.0):
    values = np.asarray(values, dtype=float)
    tl = Timeline(sample_rate_hz=fs, slope_window_frames=10, slope_stride_frames=5)
    return SlopeStream(
        values=values,
        times=tl.slope_window_time(np.arange(values.shape[0])),
        timeline=tl,
    )


class TestRollingReference:
    def test_warm_up_returns_none(self):
        ref = RollingReference(capacity=10)
        rng = np.random.default_rng(0)
        # d=3: first d+2=5 updates have fewer than 5 buffered vectors
        for _ in range(5):
            assert ref.update(rng.normal(size=3)) is None
        assert ref.update(rng.normal(size=3)) is not None

    def test_score_excludes_current_point(self):
        # scored against buffer contents BEFORE insertion, so a later
        # identical point still gets the same distance as an outlier would
        ref = RollingReference(capacity=30, ridge=0.0)
        rng = np.random.default_rng(1)
        base = rng.normal(size=(10, 2))
        for row in base:
            ref.update(row)
        probe = np.array([50.0, 50.0])
        point = ref.update(probe)
        model = fit_gaussian(base, ridge=0.0)
        y = solve_triangular(model.chol, probe - model.mean, lower=True)
        assert point.score == pytest.approx(float(np.sqrt(y @ y)), rel=1e-12)

    def test_fifo_eviction(self):
        # after capacity is exceeded the oldest vectors stop influencing scores
        ref = RollingReference(capacity=5, ridge=0.0)
        rng = np.random.default_rng(2)
        history = []
        for _ in range(12):
            x = rng.normal(size=1)
            history.append(x)
            ref.update(x)
        probe = np.array([0.3])
        point = ref.update(probe)
        model = fit_gaussian(np.asarray(history[-5:]), ridge=0.0)
        y = solve_triangular(model.chol, probe - model.mean, lower=True)
        assert point.score == pytest.approx(float(np.sqrt(y @ y)), rel=1e-12)

    def test_outlier_scores_high(self):
        rng = np.random.default_rng(3)
        ref = RollingReference(capacity=30)
        for _ in range(30):
            ref.update(rng.normal(size=2))
        inlier = ref.update(rng.normal(size=2))
        far = ref.update(np.array([100.0, 100.0]))
        assert far.score > 10 * inlier.score

    def test_degenerate_reference_flagged(self):
        ref = RollingReference(capacity=10)
        for i in range(6):
            ref.update(np.array([float(i), float(i)]))  # rank-1 buffer
        point = ref.update(np.array([1.0, -1.0]))
        assert point.degenerate
        assert np.isfinite(point.score)

    def test_dimension_change_rejected(self):
        ref = RollingReference()
        ref.update(np.zeros(2))
        with pytest.raises(ToolkitError):
            ref.update(np.zeros(3))

    def test_non_finite_rejected(self):
        ref = RollingReference()
        with pytest.raises(ToolkitError):
            ref.update(np.array([np.inf, 0.0]))

    def test_tiny_capacity_rejected(self):
        with pytest.raises(ParameterError):
            RollingReference(capacity=2)


class TestScoreStream:
    def test_count_and_indices(self):
        rng = np.random.default_rng(4)
        slopes = make_slopes(rng.normal(size=(50, 3)))
        points = score_stream(slopes, capacity=30)
        # warm-up consumes d+2 = 5 vectors
        assert len(points) == 45
        assert points[0].window_index == 5
        assert points[-1].window_index == 49

    def test_times_carried_through(self):
        rng = np.random.default_rng(5)
        slopes = make_slopes(rng.normal(size=(20, 2)))
        points = score_stream(slopes)
        for p in points:
            assert p.t_seconds == pytest.approx(float(slopes.times[p.window_index]))

    def test_csv_round_trip(self, tmp_path):
        rng = np.random.default_rng(6)
        slopes = make_slopes(rng.normal(size=(40, 2)))
        points = score_stream(slopes)
        p = tmp_path / "scores.csv"
        write_score_csv(points, p)
        back = read_score_csv(p)
        assert back == points
