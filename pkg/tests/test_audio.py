import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vowelart.audio import (
    Waveform,
    build_grid,
    load_wav,
    resample,
    trim_bounds,
    trim_edges,
)
from vowelart.errors import AudioError, NoSpeechError, SignalTooShortError


def _write_pcm16(path, rate, channels, samples):
    """Hand-rolled RIFF/WAVE writer so load_wav is tested independently."""
    frames = b"".join(struct.pack("<" + "h" * channels, *frame) for frame in samples)
    byte_rate = rate * channels * 2
    header = (
        b"RIFF" + struct.pack("<I", 36 + len(frames)) + b"WAVE"
        + b"fmt " + struct.pack("<IHHIIHH", 16, 1, channels, rate, byte_rate,
                                channels * 2, 16)
        + b"data" + struct.pack("<I", len(frames))
    )
    path.write_bytes(header + frames)


class TestLoadWav:
    def test_zero_signal(self, tmp_path):
        p = tmp_path / "zeros.wav"
        _write_pcm16(p, 44100, 1, [(0,)] * 44100)
        wav = load_wav(p)
        assert wav.sample_rate == 44100
        assert wav.samples.size == 44100
        assert np.all(wav.samples == 0.0)

    def test_int16_scaling(self, tmp_path):
        p = tmp_path / "four.wav"
        _write_pcm16(p, 16000, 1, [(32767,), (-32768,), (0,), (16384,)])
        wav = load_wav(p)
        np.testing.assert_allclose(
            wav.samples, [32767 / 32768, -1.0, 0.0, 0.5], atol=1e-12
        )

    def test_stereo_mixdown(self, tmp_path):
        p = tmp_path / "stereo.wav"
        half = 16384
        _write_pcm16(p, 16000, 2, [(half, -half)] * 100)
        wav = load_wav(p)
        assert np.all(wav.samples == 0.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(AudioError):
            load_wav(tmp_path / "nope.wav")

    def test_zero_length(self, tmp_path):
        p = tmp_path / "empty.wav"
        _write_pcm16(p, 16000, 1, [])
        with pytest.raises(AudioError):
            load_wav(p)


class TestResample:
    def test_duration_preserved(self):
        wav = Waveform(np.zeros(44100), 44100)
        out = resample(wav, 16000)
        assert abs(out.samples.size - 16000) <= 1

    def test_sine_peak_preserved(self):
        fs = 44100
        t = np.arange(fs) / fs
        wav = Waveform(0.5 * np.sin(2 * np.pi * 1000 * t), fs)
        out = resample(wav, 16000)
        spec = np.abs(np.fft.rfft(out.samples * np.hanning(out.samples.size)))
        freqs = np.fft.rfftfreq(out.samples.size, 1 / 16000)
        bin_width = freqs[1] - freqs[0]
        assert abs(freqs[spec.argmax()] - 1000.0) <= bin_width

    def test_identity(self):
        rng = np.random.default_rng(0)
        wav = Waveform(rng.uniform(-0.5, 0.5, 4000), 16000)
        out = resample(wav, 16000)
        np.testing.assert_allclose(out.samples, wav.samples, atol=1e-6)

    def test_round_trip_tone(self):
        fs = 44100
        t = np.arange(fs) / fs
        wav = Waveform(0.5 * np.sin(2 * np.pi * 440 * t), fs)
        back = resample(resample(wav, 16000), fs)
        spec = np.abs(np.fft.rfft(back.samples * np.hanning(back.samples.size)))
        freqs = np.fft.rfftfreq(back.samples.size, 1 / fs)
        assert abs(freqs[spec.argmax()] - 440.0) <= freqs[1]

    def test_rejects_nonpositive_rate(self):
        wav = Waveform(np.zeros(100), 16000)
        with pytest.raises(AudioError):
            resample(wav, 0)


def _tone_with_silence(fs=16000, lead=0.5, tone=1.0, tail=0.5):
    t = np.arange(int(tone * fs)) / fs
    sig = np.concatenate([
        np.zeros(int(lead * fs)),
        0.5 * np.sin(2 * np.pi * 220 * t),
        np.zeros(int(tail * fs)),
    ])
    return Waveform(sig, fs)


class TestTrim:
    def test_constructed_fixture(self):
        out = trim_edges(_tone_with_silence())
        assert abs(out.duration_s - 1.0) <= 0.03

    def test_nothing_to_trim(self):
        fs = 16000
        t = np.arange(fs) / fs
        wav = Waveform(0.5 * np.sin(2 * np.pi * 220 * t), fs)
        out = trim_edges(wav)
        assert abs(out.duration_s - wav.duration_s) <= 0.011

    def test_all_zero_raises(self):
        with pytest.raises(NoSpeechError):
            trim_edges(Waveform(np.zeros(16000), 16000))

    def test_idempotent(self):
        once = trim_edges(_tone_with_silence())
        twice = trim_edges(once)
        assert abs(twice.duration_s - once.duration_s) <= 0.011

    def test_positive_threshold_rejected(self):
        with pytest.raises(AudioError):
            trim_bounds(_tone_with_silence(), threshold_db=3.0)


class TestBuildGrid:
    def test_frame_count_example(self):
        wav = Waveform(np.zeros(16080), 16000)  # exactly 1.005 s at 16 kHz
        grid = build_grid(wav, 0.045, 0.030)
        assert grid.count == 33

    def test_single_frame_boundary(self):
        wav = Waveform(np.zeros(int(0.045 * 16000)), 16000)
        grid = build_grid(wav, 0.045, 0.030)
        assert grid.count == 1

    def test_too_short(self):
        wav = Waveform(np.zeros(int(0.040 * 16000)), 16000)
        with pytest.raises(SignalTooShortError):
            build_grid(wav, 0.045, 0.030)

    def test_centers_uniform(self):
        wav = Waveform(np.zeros(32000), 16000)
        grid = build_grid(wav)
        hops = np.diff(grid.frame_centers)
        np.testing.assert_allclose(hops, grid.hop_s, atol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(
        duration=st.floats(0.05, 5.0),
        window=st.floats(0.01, 0.05),
        hop_frac=st.floats(0.1, 1.0),
    )
    def test_count_formula_property(self, duration, window, hop_frac):
        if duration < window:
            duration, window = window, duration
        if window < 0.005:
            window = 0.005
        hop = max(window * hop_frac, 0.001)
        fs = 16000
        wav = Waveform(np.zeros(int(round(duration * fs))), fs)
        actual_dur = wav.duration_s
        if actual_dur < window:
            return
        grid = build_grid(wav, window, hop)
        expected = int(np.floor((actual_dur - window) / hop + 1e-9)) + 1
        assert grid.count == expected
        # every window fully contained
        assert grid.frame_centers[0] - window / 2 >= -1e-9
        assert grid.frame_centers[-1] + window / 2 <= actual_dur + 1e-9
