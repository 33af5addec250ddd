import math

import numpy as np
import pytest

from emgdrift.detectors import (
    DEFAULTS,
    DETECTOR_KINDS,
    Detector,
    DetectorConfig,
    DriftEvent,
    ScoreBinarizer,
    Status,
    create_detector,
    detect_series,
    write_events_csv,
)
from emgdrift.errors import ParameterError, ToolkitError
from emgdrift.scoring import ScorePoint


def run(detector, values):
    return [detector.update(v).status for v in values]


def drift_indices(detector, values):
    return [i for i, v in enumerate(values) if detector.update(v).status is Status.DRIFT]


def shift_stream(seed, n_pre=1000, n_post=1000, loc=3.0):
    rng = np.random.default_rng(seed)
    return np.concatenate([rng.normal(size=n_pre), rng.normal(loc=loc, size=n_post)])


class TestCusumReferenceSimulation:
    def test_matches_straight_line_simulation(self):
        # independent re-derivation of the CUSUM recursion, kept separate
        # from the implementation on purpose
        delta, threshold, min_n = 0.005, 50.0, 30
        rng = np.random.default_rng(0)
        stream = np.concatenate([rng.normal(size=1000), rng.normal(loc=5.0, size=1000)])

        def simulate(values):
            out = []
            n = 0
            mean = 0.0
            m2 = 0.0
            g_pos = g_neg = 0.0
            for i, x in enumerate(values):
                std = math.sqrt(m2 / (n - 1)) if n >= 2 else 0.0
                fired = False
                if n >= min_n and std > 0:
                    z = (x - mean) / std
                    g_pos = max(0.0, g_pos + z - delta)
                    g_neg = max(0.0, g_neg - z - delta)
                    fired = max(g_pos, g_neg) > threshold
                n += 1
                d = x - mean
                mean += d / n
                m2 += d * (x - mean)
                if fired:
                    out.append(i)
                    n = 0
                    mean = m2 = 0.0
                    g_pos = g_neg = 0.0
            return out

        expected = simulate(stream)
        assert expected[0] == 1010
        detector = create_detector(
            DetectorConfig("CUSUM", {"delta": delta, "threshold": threshold, "min_n": min_n})
        )
        got = drift_indices(detector, stream)
        assert got == expected
        assert 1000 < got[0] <= 1100


class TestPerDetectorBehaviour:
    @pytest.mark.parametrize("kind", [k for k in DETECTOR_KINDS if k != "DDM"])
    def test_detects_large_mean_shift(self, kind):
        detector = create_detector(DetectorConfig(kind))
        hits = drift_indices(detector, shift_stream(100, loc=3.0))
        assert hits, f"{kind} missed a 3-sigma shift"
        assert 1000 < hits[0] <= 1500

    @pytest.mark.parametrize("kind", [k for k in DETECTOR_KINDS if k != "DDM"])
    def test_quiet_on_short_stationary_stream(self, kind):
        detector = create_detector(DetectorConfig(kind))
        rng = np.random.default_rng(200)
        statuses = run(detector, rng.normal(size=5000))
        assert Status.DRIFT not in statuses

    def test_ddm_on_bernoulli_error_stream(self):
        detector = create_detector(DetectorConfig("DDM"))
        rng = np.random.default_rng(7)
        values = np.concatenate(
            [
                (rng.random(1000) < 0.05).astype(float),
                (rng.random(500) < 0.6).astype(float),
            ]
        )
        statuses = run(detector, values)
        assert Status.DRIFT in statuses
        first_drift = statuses.index(Status.DRIFT)
        assert first_drift > 1000
        assert Status.WARNING in statuses[:first_drift]

    def test_ddm_rejects_non_binary(self):
        detector = create_detector(DetectorConfig("DDM"))
        with pytest.raises(ToolkitError):
            detector.update(0.5)

    @pytest.mark.parametrize("kind", [k for k in DETECTOR_KINDS if k != "DDM"])
    def test_reset_allows_second_detection(self, kind):
        detector = create_detector(DetectorConfig(kind))
        rng = np.random.default_rng(42)
        stream = np.concatenate(
            [
                rng.normal(size=1000),
                rng.normal(loc=4.0, size=1000),
                rng.normal(loc=-4.0, size=1000) if kind not in ("HDDM_A", "HDDM_W")
                else rng.normal(loc=8.0, size=1000),
            ]
        )
        hits = drift_indices(detector, stream)
        assert any(h <= 2000 for h in hits), f"{kind}: no drift after first shift"
        assert any(h > 2000 for h in hits), f"{kind}: no drift after second shift"

    def test_n_seen_resets_after_drift(self):
        detector = create_detector(DetectorConfig("CUSUM"))
        stream = shift_stream(0, loc=5.0)
        last_drift = None
        for i, x in enumerate(stream):
            state = detector.update(x)
            if last_drift is not None and i == last_drift + 1:
                assert state.n_seen == 1
            if state.status is Status.DRIFT:
                last_drift = i

    @pytest.mark.parametrize("kind", DETECTOR_KINDS)
    def test_non_finite_rejected(self, kind):
        detector = create_detector(DetectorConfig(kind))
        with pytest.raises(ToolkitError):
            detector.update(float("nan"))

    def test_determinism(self):
        stream = shift_stream(3)
        for kind in DETECTOR_KINDS:
            if kind == "DDM":
                continue
            a = drift_indices(create_detector(DetectorConfig(kind)), stream)
            b = drift_indices(create_detector(DetectorConfig(kind)), stream)
            assert a == b


class TestScoreBinarizer:
    def test_calibration_then_threshold(self):
        binarizer = ScoreBinarizer(quantile=95.0, calibration_n=50)
        calibration = [binarizer.push(float(i)) for i in range(50)]
        assert all(v is None for v in calibration)
        # 95th percentile of 0..49 by linear interpolation is 46.55
        assert binarizer.push(46.0) == 0.0
        assert binarizer.push(47.0) == 1.0

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            ScoreBinarizer(quantile=0.0)
        with pytest.raises(ParameterError):
            ScoreBinarizer(calibration_n=1)


class TestFactory:
    def test_unknown_kind_named(self):
        with pytest.raises(ParameterError, match="NOPE"):
            create_detector(DetectorConfig("NOPE"))

    def test_unknown_param_named(self):
        with pytest.raises(ParameterError, match="bogus"):
            create_detector(DetectorConfig("CUSUM", {"bogus": 1}))

    def test_invalid_param_value(self):
        with pytest.raises(ParameterError, match="delta"):
            create_detector(DetectorConfig("ADWIN", {"delta": 2.0}))

    @pytest.mark.parametrize("kind", DETECTOR_KINDS)
    def test_defaults_construct(self, kind):
        detector = create_detector(DetectorConfig(kind))
        assert isinstance(detector, Detector)
        assert detector.kind == kind

    def test_override_applied(self):
        detector = create_detector(DetectorConfig("CUSUM", {"threshold": 7.5}))
        assert detector.threshold == 7.5
        assert detector.delta == DEFAULTS["CUSUM"]["delta"]


class TestDetectSeries:
    @staticmethod
    def points(values):
        return [
            ScorePoint(score=float(v), window_index=i, t_seconds=i * 0.1)
            for i, v in enumerate(values)
        ]

    def test_event_per_transition(self):
        stream = shift_stream(0, loc=5.0)
        events = detect_series(DetectorConfig("CUSUM"), self.points(stream))
        drifts = [e for e in events if e.kind == "drift"]
        assert drifts
        assert drifts[0].score_index > 1000
        assert drifts[0].t_seconds == pytest.approx(drifts[0].score_index * 0.1)

    def test_sustained_drift_is_one_event(self):
        # a detector that never resets would re-report every step; the
        # transition rule plus post-drift reset must yield isolated events
        stream = shift_stream(1, loc=5.0, n_post=200)
        events = detect_series(DetectorConfig("CUSUM"), self.points(stream))
        indices = [e.score_index for e in events if e.kind == "drift"]
        assert all(b - a > 1 for a, b in zip(indices, indices[1:]))

    def test_ddm_adapter_keys(self):
        rng = np.random.default_rng(9)
        scores = np.concatenate([rng.normal(size=500), rng.normal(loc=6.0, size=300)])
        events = detect_series(
            DetectorConfig("DDM", {"binarize_quantile": 90.0, "binarize_calibration_n": 40}),
            self.points(scores),
        )
        assert any(e.kind == "drift" for e in events)

    def test_events_csv(self, tmp_path):
        events = [DriftEvent("CUSUM", "drift", 1.5, 15)]
        p = tmp_path / "events.csv"
        write_events_csv(events, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "detector,kind,t_seconds,score_index"
        assert lines[1] == "CUSUM,drift,1.5,15"
