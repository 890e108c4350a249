"""Frame-level F1/F2 estimation via Burg linear prediction.

The analysis chain mirrors the common Praat setup: resample a dedicated
analysis copy to twice the formant ceiling, apply +6 dB/octave pre-emphasis,
window each frame with a Gaussian, fit an all-pole model with Burg's method,
and convert the pole angles/magnitudes to formant frequencies and bandwidths.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import windows

from .audio import resample
from .errors import DegenerateFrameError, RootFindingError, UnstableRecursionError

# A reflection coefficient this close to the unit circle is clamped rather
# than rejected (marginally predictable signals, e.g. pure oscillations).
_REFLECTION_CLAMP = 1.0 - 1e-9
_ROOT_RESIDUAL_TOL = 1e-6
# Margin below the analysis Nyquist within which poles are discarded.
_NYQUIST_MARGIN_HZ = 50.0


@dataclass(frozen=True)
class FormantConfig:
    max_formant_hz: float = 5500.0
    lpc_order: int = 10
    pre_emphasis_from_hz: float = 50.0
    min_formant_hz: float = 90.0
    max_bandwidth_hz: float | None = None  # optional picking cutoff, off by default

    def __post_init__(self):
        if self.lpc_order < 4 or self.lpc_order % 2:
            raise ValueError(f"lpc_order must be an even integer >= 4, got {self.lpc_order}")
        if not (0 < self.min_formant_hz < self.max_formant_hz):
            raise ValueError("need 0 < min_formant_hz < max_formant_hz")


@dataclass(frozen=True)
class ErrorBoundary:
    """Gross-error region: F1 above and F2 below the extreme /a/ exemplar."""

    f1_max_hz: float = 1002.0
    f2_min_hz: float = 1688.0

    def __post_init__(self):
        if self.f1_max_hz >= self.f2_min_hz:
            raise ValueError("f1_max_hz must be below f2_min_hz")


@dataclass(frozen=True)
class FormantFrame:
    center_s: float
    valid: bool
    f1_hz: float = float("nan")
    f2_hz: float = float("nan")
    b1_hz: float = float("nan")
    b2_hz: float = float("nan")


@dataclass(frozen=True)
class FormantTrack:
    frames: tuple
    warnings: tuple = field(default=())

    @property
    def count(self):
        return len(self.frames)

    def valid_mask(self):
        return np.array([f.valid for f in self.frames], dtype=bool)


def burg_coefficients(samples, order):
    """AR model coefficients a_1..a_p (x_t = sum a_k x_{t-k}) by Burg's method.

    Minimizes the summed forward and backward prediction error; every
    reflection coefficient is confined to (-1, 1), which guarantees a
    stable model.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size <= order:
        raise DegenerateFrameError(f"frame length {x.size} <= order {order}")
    if not np.any(x):
        raise DegenerateFrameError("degenerate frame: all samples zero")

    f = x[1:].copy()
    b = x[:-1].copy()
    a = np.zeros(0)
    for _ in range(order):
        den = f @ f + b @ b
        if den <= 0.0 or not np.isfinite(den):
            raise DegenerateFrameError("degenerate frame: prediction error vanished")
        k = -2.0 * (f @ b) / den
        if not np.isfinite(k) or abs(k) > 1.0 + 1e-8:
            raise UnstableRecursionError(f"unstable recursion: reflection coefficient {k}")
        if abs(k) >= _REFLECTION_CLAMP:
            k = np.copysign(_REFLECTION_CLAMP, k)
        a = np.concatenate([a + k * a[::-1], [k]]) if a.size else np.array([k])
        f, b = f[1:] + k * b[1:], b[:-1] + k * f[:-1]
    # error-filter convention -> model convention
    return -a


def polynomial_roots(coefficients):
    """Roots of 1 - sum_k a_k z^{-k}, via companion-matrix eigenvalues."""
    a = np.asarray(coefficients, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise RootFindingError("non-finite prediction coefficients")
    poly = np.concatenate([[1.0], -a])
    roots = np.roots(poly)
    if roots.size < a.size:  # leading zeros stripped by np.roots
        roots = np.concatenate([roots, np.zeros(a.size - roots.size, dtype=complex)])
    scale = np.max(np.abs(poly))
    for r in roots:
        residual = abs(np.polyval(poly, r)) / (scale * max(1.0, abs(r)) ** a.size)
        if residual > _ROOT_RESIDUAL_TOL:
            raise RootFindingError(
                f"root residual {residual:.3e} exceeds {_ROOT_RESIDUAL_TOL} at root {r}"
            )
    return roots


def roots_to_formants(roots, analysis_rate_hz, cfg=FormantConfig()):
    """Convert upper-half-plane poles to (frequency, bandwidth) candidates.

    f = angle * fs / (2*pi); B = -fs/pi * ln|r|. Candidates outside
    [min_formant_hz, Nyquist - 50 Hz] or on/outside the unit circle are
    dropped. Returned sorted by ascending frequency.
    """
    if analysis_rate_hz <= 0:
        raise ValueError("analysis_rate_hz must be positive")
    fs = float(analysis_rate_hz)
    out = []
    for r in np.asarray(roots, dtype=complex):
        if r.imag <= 0.0:
            continue
        mag = abs(r)
        if mag >= 1.0 or mag == 0.0:
            continue
        freq = np.angle(r) * fs / (2.0 * np.pi)
        if not (cfg.min_formant_hz <= freq <= fs / 2.0 - _NYQUIST_MARGIN_HZ):
            continue
        bw = -fs / np.pi * np.log(mag)
        if cfg.max_bandwidth_hz is not None and bw > cfg.max_bandwidth_hz:
            continue
        out.append((float(freq), float(bw)))
    out.sort()
    return out


def _pre_emphasis(samples, rate, from_hz):
    coeff = np.exp(-2.0 * np.pi * from_hz / rate)
    y = samples.copy()
    y[1:] -= coeff * samples[:-1]
    return y


def track_formants(wav, grid, cfg=FormantConfig()):
    """Per-frame F1/F2 over a frame grid; failed frames are marked invalid."""
    analysis_rate = int(round(2 * cfg.max_formant_hz))
    analysis = resample(wav, analysis_rate) if wav.sample_rate != analysis_rate else wav
    emphasized = _pre_emphasis(analysis.samples, analysis_rate, cfg.pre_emphasis_from_hz)

    win_len = int(round(grid.window_s * analysis_rate))
    window = windows.gaussian(win_len, std=win_len / 6.0)
    silence_rms = 1e-6

    frames = []
    for center in grid.frame_centers:
        mid = int(round(center * analysis_rate))
        lo = mid - win_len // 2
        hi = lo + win_len
        if lo < 0 or hi > emphasized.size:
            frames.append(FormantFrame(center, valid=False))
            continue
        seg = emphasized[lo:hi] * window
        if np.sqrt(np.mean(seg**2)) < silence_rms:
            frames.append(FormantFrame(center, valid=False))
            continue
        try:
            a = burg_coefficients(seg, cfg.lpc_order)
            cands = roots_to_formants(polynomial_roots(a), analysis_rate, cfg)
        except (DegenerateFrameError, UnstableRecursionError, RootFindingError):
            frames.append(FormantFrame(center, valid=False))
            continue
        if len(cands) < 2:
            frames.append(FormantFrame(center, valid=False))
            continue
        (f1, b1), (f2, b2) = cands[0], cands[1]
        frames.append(FormantFrame(center, True, f1, f2, b1, b2))

    notes = []
    n_invalid = sum(not f.valid for f in frames)
    if frames and n_invalid > len(frames) / 2:
        notes.append(f"{n_invalid}/{len(frames)} frames invalid (>50%)")
    return FormantTrack(tuple(frames), tuple(notes))


def screen_errors(track, boundary=ErrorBoundary()):
    """Flag frames concurrently beyond both /a/-exemplar boundaries.

    Returns (flags, error_ratio) where flags align with track frames and
    error_ratio = flagged / valid (0 when no frames are valid).
    """
    if track.count == 0:
        raise ValueError("empty formant track")
    flags = np.array(
        [
            f.valid and f.f1_hz > boundary.f1_max_hz and f.f2_hz < boundary.f2_min_hz
            for f in track.frames
        ],
        dtype=bool,
    )
    n_valid = int(track.valid_mask().sum())
    ratio = float(flags.sum() / n_valid) if n_valid else 0.0
    return flags, ratio


def dump_track_csv(track, flags, path):
    """Debug CSV: center_s,f1_hz,f2_hz,b1_hz,b2_hz,valid,error_flag."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("center_s,f1_hz,f2_hz,b1_hz,b2_hz,valid,error_flag\n")
        for frame, flag in zip(track.frames, flags):
            if frame.valid:
                vals = f"{frame.f1_hz:.6g},{frame.f2_hz:.6g},{frame.b1_hz:.6g},{frame.b2_hz:.6g}"
            else:
                vals = ",,,"
            fh.write(f"{frame.center_s:.6g},{vals},{int(frame.valid)},{int(bool(flag))}\n")
