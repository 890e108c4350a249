"""Synthetic vowels and centralization-controlled cohorts.

Source-filter synthesis: an impulse train at the fundamental drives a
cascade of two-pole resonators at the target formants plus a fixed third
resonator, giving clean spectra with known ground truth. Cohorts interpolate
corner-vowel targets toward the space center by a per-speaker factor,
modeling articulatory undershoot with an analytically known VAI.
"""

import csv
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.io import wavfile
from scipy.signal import lfilter

from .audio import DEFAULT_HOP_S, DEFAULT_WINDOW_S, Waveform
from .errors import VowelArtError
from .posterior import CANONICAL_LABELS, Posteriorgram, write_posteriorgram

# Fixed upper resonators keep the order-10 all-pole analysis well-posed
# (five pole pairs, five resonances).
_FIXED_RESONATORS = ((2800.0, 250.0), (3500.0, 300.0), (4500.0, 350.0))
# -6 dB/oct source tilt; the analysis pre-emphasis zero cancels it, keeping
# the all-pole fit unbiased.
_TILT_FROM_HZ = 50.0
_SILENCE_LABEL = "P"  # any non-vowel label; silence frames must never be selected
_VOWEL_LABEL = {"a": "AA", "i": "IY", "u": "UW"}
_EXTENDED_EDGE_LABEL = {"a": "AH", "i": "IH", "u": "UH"}

DEFAULT_CORNERS = {"a": (800.0, 1300.0), "i": (300.0, 2300.0), "u": (350.0, 800.0)}
DEFAULT_CENTER = (500.0, 1500.0)


@dataclass(frozen=True)
class VowelSpec:
    f1_hz: float
    f2_hz: float
    b1_hz: float = 80.0
    b2_hz: float = 120.0
    f0_hz: float = 120.0
    duration_s: float = 0.6
    sample_rate_hz: int = 16000

    def __post_init__(self):
        if not (0 < self.f1_hz < self.f2_hz < self.sample_rate_hz / 2):
            raise VowelArtError(
                f"need 0 < f1 ({self.f1_hz}) < f2 ({self.f2_hz}) < Nyquist"
            )
        if self.f0_hz >= self.f1_hz:
            raise VowelArtError(f"f0 ({self.f0_hz}) must lie below f1 ({self.f1_hz})")


@dataclass(frozen=True)
class CentralizationSpec:
    lam: float
    corners: dict = field(default_factory=lambda: dict(DEFAULT_CORNERS))
    center: tuple = DEFAULT_CENTER
    jitter_std_hz: float = 15.0

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise VowelArtError(f"lambda must be in [0, 1], got {self.lam}")

    def targets(self):
        """Corner targets pulled toward the center by the factor lambda."""
        cx, cy = self.center
        return {
            v: (f1 + self.lam * (cx - f1), f2 + self.lam * (cy - f2))
            for v, (f1, f2) in self.corners.items()
        }


def _resonator_coeffs(freq_hz, bw_hz, rate_hz):
    r = np.exp(-np.pi * bw_hz / rate_hz)
    theta = 2.0 * np.pi * freq_hz / rate_hz
    a = [1.0, -2.0 * r * np.cos(theta), r * r]
    # unit gain at the resonance peak is irrelevant; output is re-normalized
    return [1.0], a


def synth_vowel(spec):
    """Impulse train through a resonator cascade, peak-normalized to 0.9."""
    fs = spec.sample_rate_hz
    n = int(round(spec.duration_s * fs))
    src = np.zeros(n)
    period = fs / spec.f0_hz
    positions = np.arange(0, n, period)
    src[np.floor(positions).astype(int)] = 1.0
    g = np.exp(-2.0 * np.pi * _TILT_FROM_HZ / fs)
    y = lfilter([1.0], [1.0, -g], src)
    for freq, bw in ((spec.f1_hz, spec.b1_hz), (spec.f2_hz, spec.b2_hz), *_FIXED_RESONATORS):
        b, a = _resonator_coeffs(freq, bw, fs)
        y = lfilter(b, a, y)
    peak = np.max(np.abs(y))
    return Waveform(0.9 * y / peak, fs)


def analytic_features(targets):
    """VAI/FCR/VSA/F2 ratio directly from target formants (no signal path)."""
    (f1a, f2a), (f1i, f2i), (f1u, f2u) = targets["a"], targets["i"], targets["u"]
    vai = (f1a + f2i) / (f2a + f1i + f1u + f2u)
    vsa = 0.5 * abs(f1i * (f2a - f2u) + f1a * (f2u - f2i) + f1u * (f2i - f2a))
    return {"vai": vai, "fcr": 1.0 / vai, "vsa": vsa, "f2i_f2u": f2i / f2u}


@dataclass(frozen=True)
class SpeakerRecord:
    speaker_id: str
    lam: float
    group: str
    wav_path: str
    posteriorgram_path: str
    annotation_path: str
    analytic: dict


_TOKEN_ORDER = ("a", "i", "u")
_SILENCE_S = 0.36
_TOKEN_S = 0.6
_SUBSEGMENTS = 3  # per-token chunks with independently jittered targets


def _speaker_signal(spec, rng, fs=16000):
    """Concatenated /a/, /i/, /u/ tokens with silences; returns signal + spans."""
    targets = spec.targets()
    sil = np.zeros(int(round(_SILENCE_S * fs)))
    pieces = [sil]
    spans = {}
    cursor = sil.size
    sub_s = _TOKEN_S / _SUBSEGMENTS
    for vowel in _TOKEN_ORDER:
        f1, f2 = targets[vowel]
        chunks = []
        for _ in range(_SUBSEGMENTS):
            j1 = f1 + rng.normal(0.0, spec.jitter_std_hz)
            j2 = f2 + rng.normal(0.0, spec.jitter_std_hz)
            j1 = max(150.0, j1)
            j2 = max(j1 + 150.0, j2)
            chunks.append(
                synth_vowel(
                    VowelSpec(j1, j2, duration_s=sub_s, sample_rate_hz=fs)
                ).samples
            )
        token = np.concatenate(chunks)
        spans[vowel] = (cursor / fs, (cursor + token.size) / fs)
        pieces.extend([token, sil])
        cursor += token.size + sil.size
    return np.concatenate(pieces), spans


def _ground_truth_posteriorgram(n_samples, fs, spans, rng):
    """Frame-level logits marking token frames with their corner vowel.

    Interior token frames carry a dominant logit for the corner label; the
    first full frame of each token is decoded as an extended-set neighbor
    (exercising criterion 1 on non-corner labels), and one mid-token frame
    is decoded as a consonant while keeping the vowel posterior high enough
    for criterion 2.
    """
    duration = n_samples / fs
    count = int(np.floor((duration - DEFAULT_WINDOW_S) / DEFAULT_HOP_S + 1e-9)) + 1
    starts = DEFAULT_HOP_S * np.arange(count)
    ends = starts + DEFAULT_WINDOW_S
    logits = np.zeros((count, len(CANONICAL_LABELS)))
    decoded = [_SILENCE_LABEL] * count
    idx = {lab: i for i, lab in enumerate(CANONICAL_LABELS)}
    logits[:, idx[_SILENCE_LABEL]] = 6.0

    for vowel, (t0, t1) in spans.items():
        label = _VOWEL_LABEL[vowel]
        inside = [
            t for t in range(count)
            if starts[t] >= t0 - 1e-9 and ends[t] <= t1 + 1e-9
        ]
        if not inside:
            continue
        crit2_frame = inside[len(inside) // 2]
        for t in inside:
            logits[t, :] = 0.0
            if t == inside[0]:
                # extended-set neighbor, decoded by criterion 1 only
                edge = _EXTENDED_EDGE_LABEL[vowel]
                logits[t, idx[edge]] = 10.0
                decoded[t] = edge
            elif t == crit2_frame:
                # decoded as a consonant; vowel survives via criterion 2
                logits[t, idx["N"]] = 5.1
                logits[t, idx[label]] = 5.0
                decoded[t] = "N"
            else:
                logits[t, idx[label]] = 10.0
                decoded[t] = label
        # small perturbation on the non-dominant logits for realism
        noise = rng.normal(0.0, 0.05, size=(len(inside), len(CANONICAL_LABELS)))
        logits[inside, :] += np.abs(noise) * -1.0
    return Posteriorgram(starts, ends, logits, tuple(decoded))


def _write_annotations(path, spans, seg_s=0.2):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("start_s,end_s,vowel\n")
        for vowel in _TOKEN_ORDER:
            t0, t1 = spans[vowel]
            mid = (t0 + t1) / 2.0
            fh.write(f"{mid - seg_s / 2:.6f},{mid + seg_s / 2:.6f},{vowel}\n")


def synth_cohort(lambdas, seed, out_dir, corners=None, center=DEFAULT_CENTER,
                 jitter_std_hz=15.0, fs=16000):
    """Generate a deterministic synthetic cohort.

    One speaker per lambda value: WAV, ground-truth posteriorgram CSV,
    annotation CSV, and analytic features from the true (unjittered)
    targets. Writes manifest.csv and returns the speaker records.
    """
    if len(lambdas) < 2:
        raise VowelArtError("need at least 2 speakers")
    corners = dict(corners or DEFAULT_CORNERS)
    os.makedirs(out_dir, exist_ok=True)
    seeds = np.random.SeedSequence(seed).spawn(len(lambdas))
    records = []
    lam_median = float(np.median(np.asarray(lambdas)))
    for j, (lam, child) in enumerate(zip(lambdas, seeds)):
        rng = np.random.default_rng(child)
        spec = CentralizationSpec(float(lam), corners, center, jitter_std_hz)
        signal, spans = _speaker_signal(spec, rng, fs)
        pg = _ground_truth_posteriorgram(signal.size, fs, spans, rng)
        sid = f"spk{j:03d}"
        wav_path = os.path.join(out_dir, f"{sid}.wav")
        pg_path = os.path.join(out_dir, f"{sid}_posteriorgram.csv")
        ann_path = os.path.join(out_dir, f"{sid}_annotation.csv")
        wavfile.write(wav_path, fs, (signal * 32767.0).astype(np.int16))
        write_posteriorgram(pg, pg_path)
        _write_annotations(ann_path, spans)
        group = "control" if lam <= lam_median else "patient"
        records.append(
            SpeakerRecord(
                sid, float(lam), group, wav_path, pg_path, ann_path,
                analytic_features(spec.targets()),
            )
        )
    manifest_path = os.path.join(out_dir, "manifest.csv")
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["speaker_id", "group", "wav_path", "posteriorgram_path",
             "annotation_path", "severity"]
        )
        for rec in records:
            writer.writerow(
                [rec.speaker_id, rec.group, os.path.basename(rec.wav_path),
                 os.path.basename(rec.posteriorgram_path),
                 os.path.basename(rec.annotation_path), f"{rec.lam:.6f}"]
            )
    return records, manifest_path
