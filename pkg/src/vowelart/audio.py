"""WAV loading, resampling, silence trimming, and analysis frame grids."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.io import wavfile
from scipy.signal import upfirdn

from .errors import AudioError, NoSpeechError, SignalTooShortError

# Analysis defaults shared with the recognizer frame contract.
DEFAULT_WINDOW_S = 0.045
DEFAULT_HOP_S = 0.030

# Energy trimming parameters.
TRIM_WINDOW_S = 0.020
TRIM_HOP_S = 0.010
DEFAULT_TRIM_DB = -35.0

# Windowed-sinc resampler design.
_KAISER_BETA = 8.0
_TAPS_PER_PHASE = 64


@dataclass(frozen=True)
class Waveform:
    """Mono audio signal with samples in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise AudioError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.ndim != 1:
            raise AudioError("Waveform requires a 1-D sample array")
        if not np.all(np.isfinite(self.samples)):
            raise AudioError("non-finite samples in waveform")

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FrameGrid:
    """Maximal grid of fully-contained analysis windows."""

    window_s: float
    hop_s: float
    frame_centers: np.ndarray

    @property
    def count(self):
        return self.frame_centers.size


def load_wav(path):
    """Read a RIFF/WAVE file into a normalized mono Waveform.

    Supports PCM 16/24/32-bit integer and 32-bit float encodings.
    Stereo files are mixed down by averaging the two channels.
    """
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise AudioError(f"cannot read {path}: file not found")
    except Exception as exc:
        raise AudioError(f"cannot read {path}: {exc}")

    if data.size == 0:
        raise AudioError(f"{path}: zero-length audio")
    if data.ndim == 2:
        if data.shape[1] > 2:
            raise AudioError(f"{path}: {data.shape[1]} channels unsupported (max 2)")
        data = data.astype(np.float64).mean(axis=1)
    elif data.ndim != 1:
        raise AudioError(f"{path}: unsupported array layout {data.shape}")

    if data.dtype == np.int16:
        samples = data / 32768.0
    elif data.dtype == np.int32:
        # scipy returns 24-bit PCM widened into int32.
        samples = data / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = np.asarray(data, dtype=np.float64)
        peak = np.max(np.abs(samples)) if samples.size else 0.0
        if peak > 1.0:
            samples = samples / peak
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:
        raise AudioError(f"{path}: unsupported sample encoding {data.dtype}")

    return Waveform(np.clip(samples, -1.0, 1.0), int(rate))


def _design_lowpass(up, down):
    """Kaiser-windowed sinc for polyphase rational resampling.

    The half-length is forced to a multiple of `down` so the group delay of
    the upsample-filter-downsample chain is an integer number of output
    samples (removed by slicing, no fractional-delay residue).
    """
    half = max(1, int(round(_TAPS_PER_PHASE * up / (2.0 * down)))) * down
    n_taps = 2 * half + 1
    n = np.arange(n_taps) - half
    cutoff = 1.0 / max(up, down)
    h = cutoff * np.sinc(cutoff * n) * np.kaiser(n_taps, _KAISER_BETA)
    # Unity DC gain through the upsample-filter-downsample chain.
    return h * (up / h.sum())


def resample(wav, target_hz):
    """Band-limited rational resampling via windowed-sinc polyphase filtering."""
    target_hz = int(target_hz)
    if target_hz <= 0:
        raise AudioError(f"target rate must be positive, got {target_hz}")
    if target_hz == wav.sample_rate:
        return Waveform(wav.samples.copy(), wav.sample_rate)

    frac = Fraction(target_hz, wav.sample_rate)
    up, down = frac.numerator, frac.denominator
    h = _design_lowpass(up, down)
    n_in = wav.samples.size
    n_out = -(-n_in * up // down)  # ceil

    half = (h.size - 1) // 2
    y_full = upfirdn(h, wav.samples, up=up, down=down)
    # Group delay is exactly half/down output samples by filter construction.
    offset = half // down
    y = y_full[offset:offset + n_out]
    if y.size < n_out:
        y = np.concatenate([y, np.zeros(n_out - y.size)])
    return Waveform(np.clip(y, -1.0, 1.0), target_hz)


def _frame_rms(samples, rate):
    win = max(1, int(round(TRIM_WINDOW_S * rate)))
    hop = max(1, int(round(TRIM_HOP_S * rate)))
    if samples.size < win:
        return np.array([np.sqrt(np.mean(samples**2))]), win, hop
    n = (samples.size - win) // hop + 1
    starts = np.arange(n) * hop
    idx = starts[:, None] + np.arange(win)[None, :]
    return np.sqrt(np.mean(samples[idx] ** 2, axis=1)), win, hop


def trim_bounds(wav, threshold_db=DEFAULT_TRIM_DB):
    """Locate the active speech extent as (start_s, end_s).

    Windows of 20 ms at 10 ms hop are kept while their RMS exceeds the peak
    window RMS plus `threshold_db` (negative dB).
    """
    if threshold_db >= 0:
        raise AudioError(f"threshold_db must be negative, got {threshold_db}")
    rms, win, hop = _frame_rms(wav.samples, wav.sample_rate)
    peak = rms.max()
    if peak <= 0:
        raise NoSpeechError("no speech detected: signal is silent")
    floor = peak * 10.0 ** (threshold_db / 20.0)
    above = np.flatnonzero(rms > floor)
    if above.size == 0:
        raise NoSpeechError("no speech detected: all frames below threshold")
    start = above[0] * hop
    end = min(above[-1] * hop + win, wav.samples.size)
    return start / wav.sample_rate, end / wav.sample_rate


def trim_edges(wav, threshold_db=DEFAULT_TRIM_DB):
    """Cut leading and trailing silence; see trim_bounds for the rule."""
    start_s, end_s = trim_bounds(wav, threshold_db)
    lo = int(round(start_s * wav.sample_rate))
    hi = int(round(end_s * wav.sample_rate))
    return Waveform(wav.samples[lo:hi].copy(), wav.sample_rate)


def build_grid(wav, window_s=DEFAULT_WINDOW_S, hop_s=DEFAULT_HOP_S):
    """Frame grid of fully-contained windows over the waveform extent."""
    if not (0 < hop_s <= window_s):
        raise AudioError(f"need 0 < hop ({hop_s}) <= window ({window_s})")
    duration = wav.duration_s
    if duration + 1e-12 < window_s:
        raise SignalTooShortError(
            f"signal too short: {duration:.4f} s < window {window_s:.4f} s"
        )
    count = int(np.floor((duration - window_s) / hop_s + 1e-9)) + 1
    centers = window_s / 2.0 + hop_s * np.arange(count)
    return FrameGrid(window_s, hop_s, centers)
