import numpy as np
import pytest
from scipy.io import savemat

from ninapro_convert import ConvertError, MissingVariableError, convert, period_from
from ninapro_convert.cli import main


def write_fixture(path, n=100, k=16, fs=2000.0, label_var="restimulus", seed=0):
    rng = np.random.default_rng(seed)
    emg = rng.normal(scale=1e-4, size=(n, k))
    labels = rng.integers(0, 12, size=(n, 1))
    savemat(path, {"emg": emg, label_var: labels, "frequency": np.array([[fs]])})
    return emg, labels.reshape(-1)


class TestPeriod:
    def test_formula(self):
        assert period_from(1, 1) == 1
        assert period_from(1, 2) == 2
        assert period_from(3, 1) == 5
        assert period_from(5, 2) == 10

    def test_bounds(self):
        with pytest.raises(ConvertError):
            period_from(0, 1)
        with pytest.raises(ConvertError):
            period_from(6, 1)
        with pytest.raises(ConvertError):
            period_from(2, 3)


class TestConvert:
    def test_round_trip_exact(self, tmp_path):
        mat = tmp_path / "s.mat"
        out = tmp_path / "s.csv"
        emg, labels = write_fixture(mat)
        rows = convert(mat, subject=3, day=2, slot=1, out_csv=out)
        assert rows == 100
        lines = out.read_text().splitlines()
        header = lines[0].split(",")
        assert header == ["t"] + [f"emg_{i+1}" for i in range(16)] + ["subject", "period", "grasp"]
        got = np.array([[float(c) for c in l.split(",")[1:17]] for l in lines[1:]])
        assert np.max(np.abs(got - emg)) <= 1e-9
        assert np.array_equal(got, emg)  # repr() text keeps full precision
        assert all(l.split(",")[17] == "3" for l in lines[1:])
        assert all(l.split(",")[18] == "3" for l in lines[1:])  # day 2 slot 1
        assert [int(l.split(",")[19]) for l in lines[1:]] == list(labels)

    def test_output_passes_primary_schema(self, tmp_path):
        emgdrift_stream = pytest.importorskip("emgdrift.stream")
        mat = tmp_path / "s.mat"
        out = tmp_path / "s.csv"
        emg, _ = write_fixture(mat)
        convert(mat, subject=1, day=1, slot=2, out_csv=out)
        stream = emgdrift_stream.load_signal_csv(out, 2000.0)
        assert len(stream) == 100
        assert stream.n_channels == 16
        assert np.array_equal(stream.values, emg)
        assert np.all(stream.period == 2)

    def test_stimulus_fallback(self, tmp_path):
        mat = tmp_path / "s.mat"
        out = tmp_path / "s.csv"
        write_fixture(mat, label_var="stimulus")
        assert convert(mat, subject=1, day=1, slot=1, out_csv=out) == 100

    def test_missing_signal_named(self, tmp_path):
        mat = tmp_path / "bad.mat"
        savemat(mat, {"restimulus": np.zeros((5, 1)), "frequency": 2000.0})
        with pytest.raises(MissingVariableError, match="emg"):
            convert(mat, 1, 1, 1, tmp_path / "o.csv")

    def test_missing_labels_named(self, tmp_path):
        mat = tmp_path / "bad.mat"
        savemat(mat, {"emg": np.zeros((5, 2)), "frequency": 2000.0})
        with pytest.raises(MissingVariableError, match="restimulus"):
            convert(mat, 1, 1, 1, tmp_path / "o.csv")

    def test_missing_fs_requires_override(self, tmp_path):
        mat = tmp_path / "bad.mat"
        savemat(mat, {"emg": np.zeros((5, 2)), "restimulus": np.zeros((5, 1))})
        out = tmp_path / "o.csv"
        with pytest.raises(MissingVariableError, match="frequency"):
            convert(mat, 1, 1, 1, out)
        assert convert(mat, 1, 1, 1, out, fs=2000.0) == 5

    def test_row_count_mismatch(self, tmp_path):
        mat = tmp_path / "bad.mat"
        savemat(mat, {"emg": np.zeros((5, 2)), "restimulus": np.zeros((4, 1)),
                      "frequency": 2000.0})
        with pytest.raises(ConvertError, match="mismatch"):
            convert(mat, 1, 1, 1, tmp_path / "o.csv")

    def test_zero_channels_not_dropped(self, tmp_path):
        # the converter is a faithful transcriber; dead columns survive
        mat = tmp_path / "s.mat"
        out = tmp_path / "s.csv"
        emg = np.ones((10, 4))
        emg[:, 2] = 0.0
        savemat(mat, {"emg": emg, "restimulus": np.ones((10, 1)), "frequency": 100.0})
        convert(mat, 1, 1, 1, out)
        header = out.read_text().splitlines()[0]
        assert "emg_3" in header


class TestCli:
    def test_success(self, tmp_path, capsys):
        mat = tmp_path / "s.mat"
        write_fixture(mat)
        out = tmp_path / "s.csv"
        code = main([str(mat), "--subject", "2", "--day", "4", "--slot", "2",
                     "--out", str(out)])
        assert code == 0
        assert "wrote 100 rows" in capsys.readouterr().out
        assert out.exists()

    def test_error_exit_1(self, tmp_path, capsys):
        code = main([str(tmp_path / "nope.mat"), "--subject", "1", "--day", "1",
                     "--slot", "1", "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["file.mat"])  # missing required options
        assert exc.value.code == 2
