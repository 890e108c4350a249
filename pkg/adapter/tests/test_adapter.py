import json
import warnings
from pathlib import Path

import numpy as np
import pytest
from scipy.io import wavfile

from phone_adapter import (
    CANONICAL_LABELS,
    EnergyBackend,
    HEADER,
    frame_count,
    infer,
    validate,
)
from phone_adapter.adapter import AdapterError
from phone_adapter.cli import main as cli_main

DATA = Path(__file__).parent / "data"
WAV_2S = DATA / "speech_2s.wav"
WAV_1005 = DATA / "tone_1005ms.wav"


def _infer(tmp_path, wav=WAV_2S, name="out.csv"):
    out = tmp_path / name
    return infer(wav, out, EnergyBackend()), out


class TestConformance:
    def test_parses_with_primary_reader_no_warnings(self, tmp_path):
        # the downstream analysis package must accept the file verbatim
        vowelart_posterior = pytest.importorskip("vowelart.posterior")
        _, out = _infer(tmp_path)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            pg = vowelart_posterior.read_posteriorgram(out)
        assert pg.labels == CANONICAL_LABELS
        sums = vowelart_posterior.softmax_rows(pg.logits).sum(axis=1)
        np.testing.assert_allclose(sums, 1.0, atol=1e-6)

    def test_canonical_header(self, tmp_path):
        _, out = _infer(tmp_path)
        header = out.read_text().splitlines()[0].split(",")
        assert tuple(header) == HEADER
        assert len(header) == 43
        assert header[3:] == sorted(header[3:])

    def test_row_count_matches_grid_formula(self, tmp_path):
        result, out = _infer(tmp_path)
        n_lines = len(out.read_text().splitlines()) - 1
        assert n_lines == frame_count(2.0) == result.n_frames

    def test_1005ms_file_gives_33_rows(self, tmp_path):
        result, _ = _infer(tmp_path, wav=WAV_1005)
        assert result.n_frames == 33

    def test_silent_file_schema_valid(self, tmp_path):
        silent = tmp_path / "silent.wav"
        wavfile.write(silent, 16000, np.zeros(16000, dtype=np.int16))
        _, out = _infer(tmp_path, wav=silent)
        checks = validate(out)
        assert all(passed for _, passed, _ in checks)

    def test_deterministic_bytes(self, tmp_path):
        _, o1 = _infer(tmp_path, name="a.csv")
        _, o2 = _infer(tmp_path, name="b.csv")
        assert o1.read_bytes() == o2.read_bytes()

    def test_provenance_sidecar(self, tmp_path):
        result, _ = _infer(tmp_path)
        sidecar = json.loads(Path(result.sidecar_path).read_text())
        assert sidecar["model_id"] == "energy-stub"
        assert sidecar["hop_s"] == pytest.approx(0.030)
        assert sidecar["window_s"] == pytest.approx(0.045)

    def test_resamples_non_16k_input(self, tmp_path):
        t = np.arange(44100) / 44100.0
        x = (0.5 * np.sin(2 * np.pi * 500 * t) * 32767).astype(np.int16)
        wav = tmp_path / "cd_rate.wav"
        wavfile.write(wav, 44100, x)
        result, out = _infer(tmp_path, wav=wav)
        assert result.n_frames == frame_count(1.0)
        assert all(p for _, p, _ in validate(out))

    def test_too_short_rejected(self, tmp_path):
        wav = tmp_path / "blip.wav"
        wavfile.write(wav, 16000, np.zeros(300, dtype=np.int16))
        with pytest.raises(AdapterError, match="short"):
            _infer(tmp_path, wav=wav)

    def test_unreadable_wav_rejected(self, tmp_path):
        bad = tmp_path / "junk.wav"
        bad.write_bytes(b"not audio")
        with pytest.raises(AdapterError, match="cannot read"):
            _infer(tmp_path, wav=bad)


class TestValidate:
    def test_valid_file_all_pass(self, tmp_path):
        _, out = _infer(tmp_path)
        checks = validate(out)
        assert len(checks) >= 5
        assert all(passed for _, passed, _ in checks)

    def test_shuffled_columns_fail_label_order(self, tmp_path):
        _, out = _infer(tmp_path)
        lines = out.read_text().splitlines()
        cols = lines[0].split(",")
        cols[3], cols[4] = cols[4], cols[3]
        lines[0] = ",".join(cols)
        out.write_text("\n".join(lines) + "\n")
        checks = dict((n, (p, d)) for n, p, d in validate(out))
        assert checks["label order"][0] is False

    def test_truncated_row_fails_with_line_number(self, tmp_path):
        _, out = _infer(tmp_path)
        lines = out.read_text().splitlines()
        lines[5] = ",".join(lines[5].split(",")[:-3])
        out.write_text("\n".join(lines) + "\n")
        checks = dict((n, (p, d)) for n, p, d in validate(out))
        passed, detail = checks["column count"]
        assert passed is False
        assert "line 6" in detail

    def test_bad_hop_detected(self, tmp_path):
        _, out = _infer(tmp_path)
        lines = out.read_text().splitlines()
        cells = lines[2].split(",")
        cells[0] = "0.05"
        lines[2] = ",".join(cells)
        out.write_text("\n".join(lines) + "\n")
        checks = dict((n, (p, d)) for n, p, d in validate(out))
        assert checks["frame timing"][0] is False

    def test_non_finite_logit_detected(self, tmp_path):
        _, out = _infer(tmp_path)
        lines = out.read_text().splitlines()
        cells = lines[3].split(",")
        cells[10] = "nan"
        lines[3] = ",".join(cells)
        out.write_text("\n".join(lines) + "\n")
        checks = dict((n, (p, d)) for n, p, d in validate(out))
        assert checks["softmax fidelity"][0] is False


class TestCli:
    def test_infer_and_validate_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "pg.csv"
        code = cli_main(["infer", str(WAV_2S), "--out", str(out),
                         "--backend", "energy"])
        assert code == 0
        assert "frames" in capsys.readouterr().out
        assert cli_main(["validate", str(out)]) == 0
        assert "PASS label order" in capsys.readouterr().out

    def test_validate_failure_exit_code(self, tmp_path, capsys):
        out = tmp_path / "pg.csv"
        cli_main(["infer", str(WAV_2S), "--out", str(out), "--backend", "energy"])
        lines = out.read_text().splitlines()
        lines[0] = lines[0].replace("AA,AE", "AE,AA")
        out.write_text("\n".join(lines) + "\n")
        capsys.readouterr()
        assert cli_main(["validate", str(out)]) == 1
        assert "FAIL label order" in capsys.readouterr().out

    def test_missing_model_is_clean_error(self, tmp_path, capsys):
        try:
            import allosaurus  # noqa: F401
        except ImportError:
            pass
        else:
            pytest.skip("allosaurus installed; covered by the real-model test")
        code = cli_main(["infer", str(WAV_2S), "--out", str(tmp_path / "o.csv"),
                         "--backend", "allosaurus"])
        assert code == 1
        assert "allosaurus" in capsys.readouterr().err

    def test_infer_unreadable_exit_1(self, tmp_path, capsys):
        code = cli_main(["infer", str(tmp_path / "none.wav"),
                         "--out", str(tmp_path / "o.csv"), "--backend", "energy"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


def test_allosaurus_backend_real_model(tmp_path):
    """End-to-end inference with the pretrained recognizer.

    Skipped when the allosaurus package (or its model download) is
    unavailable in the environment.
    """
    pytest.importorskip(
        "allosaurus", reason="allosaurus not installed in this environment"
    )
    from phone_adapter.backends import AllosaurusBackend, BackendError

    try:
        backend = AllosaurusBackend()
    except BackendError as exc:  # model download unavailable
        pytest.skip(str(exc))
    infer(WAV_2S, tmp_path / "real.csv", backend)
    checks = validate(tmp_path / "real.csv")
    assert all(passed for _, passed, _ in checks)
