import numpy as np
import pytest

from emgdrift.preprocess import (
    StreamingRms,
    StreamingSlope,
    read_feature_csv,
    rms_extract,
    slope_features,
    write_rms_csv,
    write_slope_csv,
)
from emgdrift.stream import SignalStream, Timeline


def make_stream(values, fs=100.0):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    n = values.shape[0]
    return SignalStream(
        values=values,
        subject=np.zeros(n),
        period=np.ones(n),
        grasp=np.ones(n),
        sample_rate_hz=fs,
    )


class TestRmsExtract:
    def test_hand_values_window_two(self):
        # sqrt(mean([3,4]^2)) = sqrt(12.5)
        tl = Timeline(sample_rate_hz=1000.0, rms_window_ms=2, rms_stride_ms=2)
        frames = rms_extract(make_stream([3.0, 4.0, 0.0, 0.0], fs=1000.0), tl)
        assert frames.values[0, 0] == pytest.approx(3.5355339059327378, abs=1e-12)
        assert frames.values[1, 0] == 0.0

    def test_constant_signal_is_fixed_point(self):
        tl = Timeline(sample_rate_hz=100.0, rms_window_ms=100, rms_stride_ms=50)
        frames = rms_extract(make_stream(np.full((40, 2), -2.0)), tl)
        assert np.allclose(frames.values, 2.0)

    def test_frame_count_and_partial_drop(self):
        # n=25, w=10, s=5 -> floor((25-10)/5)+1 = 4 frames
        tl = Timeline(sample_rate_hz=100.0, rms_window_ms=100, rms_stride_ms=50)
        frames = rms_extract(make_stream(np.ones(25)), tl)
        assert len(frames) == 4

    def test_short_stream_warns_empty(self):
        tl = Timeline(sample_rate_hz=100.0, rms_window_ms=100, rms_stride_ms=50)
        with pytest.warns(UserWarning):
            frames = rms_extract(make_stream(np.ones(5)), tl)
        assert len(frames) == 0

    def test_times_follow_timeline(self):
        tl = Timeline(sample_rate_hz=100.0, rms_window_ms=100, rms_stride_ms=50)
        frames = rms_extract(make_stream(np.ones(30)), tl)
        assert frames.times[0] == pytest.approx(tl.rms_frame_time(0))
        assert frames.times[-1] == pytest.approx(tl.rms_frame_time(len(frames) - 1))


class TestSlopeFeatures:
    def test_exact_linear_recovery(self):
        # y = 0.7*k + 3 per channel; the OLS slope over any window is 0.7
        tl = Timeline(
            sample_rate_hz=100.0,
            rms_window_ms=100,
            rms_stride_ms=50,
            slope_window_frames=10,
            slope_stride_frames=5,
        )
        frames = rms_extract(make_stream(np.ones(5000)), tl)
        ramp = 0.7 * np.arange(len(frames))[:, None] + 3.0
        frames = type(frames)(values=ramp, times=frames.times, timeline=tl)
        slopes = slope_features(frames, tl)
        assert np.allclose(slopes.values, 0.7, atol=1e-12)

    def test_constant_gives_zero_slope(self):
        tl = Timeline(sample_rate_hz=100.0, slope_window_frames=8, slope_stride_frames=4)
        frames = rms_extract(
            make_stream(np.full(2000, 5.0)),
            Timeline(sample_rate_hz=100.0),
        )
        slopes = slope_features(frames, tl)
        assert np.allclose(slopes.values, 0.0, atol=1e-12)

    def test_window_count(self):
        # 23 frames, w=10, s=5 -> 3 windows
        tl = Timeline(sample_rate_hz=100.0, slope_window_frames=10, slope_stride_frames=5)
        frames = rms_extract(make_stream(np.ones((23 - 1) * 2 + 20)), Timeline(sample_rate_hz=100.0))
        assert len(frames) == 23
        assert len(slope_features(frames, tl)) == 3

    def test_short_input_warns_empty(self):
        tl = Timeline(sample_rate_hz=100.0, slope_window_frames=100, slope_stride_frames=50)
        frames = rms_extract(make_stream(np.ones(50)), Timeline(sample_rate_hz=100.0))
        with pytest.warns(UserWarning):
            slopes = slope_features(frames, tl)
        assert len(slopes) == 0


class TestStreamingEquivalence:
    def test_streaming_rms_matches_batch(self):
        rng = np.random.default_rng(11)
        stream = make_stream(rng.normal(size=(500, 3)))
        tl = Timeline(sample_rate_hz=100.0, rms_window_ms=70, rms_stride_ms=30)
        batch = rms_extract(stream, tl)
        inc = StreamingRms(tl, 3)
        emitted = [f for f in (inc.push(row) for row in stream.values) if f is not None]
        assert len(emitted) == len(batch)
        got = np.array([f.values for f in emitted])
        assert np.allclose(got, batch.values, rtol=1e-12, atol=0)
        assert emitted[0].t_seconds == pytest.approx(batch.times[0])

    def test_streaming_slope_matches_batch(self):
        rng = np.random.default_rng(12)
        stream = make_stream(rng.normal(size=(2000, 2)))
        tl = Timeline(
            sample_rate_hz=100.0,
            slope_window_frames=12,
            slope_stride_frames=7,
        )
        frames = rms_extract(stream, tl)
        batch = slope_features(frames, tl)
        inc = StreamingSlope(tl, 2)
        emitted = [v for v in (inc.push(row) for row in frames.values) if v is not None]
        assert len(emitted) == len(batch)
        got = np.array([v.slopes for v in emitted])
        assert np.allclose(got, batch.values, rtol=1e-12, atol=0)


class TestFeatureCsv:
    def test_rms_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        stream = make_stream(rng.normal(size=(100, 2)))
        tl = Timeline(sample_rate_hz=100.0)
        frames = rms_extract(stream, tl)
        p = tmp_path / "rms.csv"
        write_rms_csv(frames, p)
        times, values = read_feature_csv(p)
        assert np.array_equal(values, frames.values)
        assert np.array_equal(times, frames.times)

    def test_slope_round_trip(self, tmp_path):
        rng = np.random.default_rng(14)
        stream = make_stream(rng.normal(size=(2000, 2)))
        tl = Timeline(sample_rate_hz=100.0, slope_window_frames=10, slope_stride_frames=5)
        slopes = slope_features(rms_extract(stream, tl), tl)
        p = tmp_path / "slope.csv"
        write_slope_csv(slopes, p)
        times, values = read_feature_csv(p)
        assert np.array_equal(values, slopes.values)
        assert np.array_equal(times, slopes.times)
