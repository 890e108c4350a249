"""Inference and validation entry points."""

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .backends import EnergyBackend
from .interchange import CANONICAL_LABELS, HEADER, HOP_S, WINDOW_S, write_rows

TARGET_RATE = 16000


class AdapterError(RuntimeError):
    pass


@dataclass(frozen=True)
class AdapterOutput:
    csv_path: str
    sidecar_path: str
    n_frames: int


def _load_mono_16k(path):
    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise AdapterError(f"cannot read {path}: {exc}") from exc
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 2:
        x = x.mean(axis=1)
    if data.dtype == np.int16:
        x /= 32768.0
    elif data.dtype == np.int32:
        x /= 2147483648.0
    elif data.dtype == np.uint8:
        x = (x - 128.0) / 128.0
    if rate != TARGET_RATE:
        frac = Fraction(TARGET_RATE, rate).limit_denominator(1000)
        x = resample_poly(x, frac.numerator, frac.denominator)
    return x


def infer(wav_path, out_path, backend=None):
    """Run the recognizer over a WAV and write the interchange CSV.

    A JSON sidecar `<out>.provenance.json` records the model identity and
    the frame-timing contract so cohort results stay attributable.
    """
    backend = backend or EnergyBackend()
    samples = _load_mono_16k(wav_path)
    if samples.size / TARGET_RATE + 1e-12 < WINDOW_S:
        raise AdapterError(
            f"{wav_path}: shorter than one analysis window ({WINDOW_S} s)"
        )
    logits, decoded, info = backend.infer_frames(samples, TARGET_RATE)
    write_rows(out_path, logits, decoded)
    sidecar_path = str(out_path) + ".provenance.json"
    sidecar = {
        "model_id": backend.model_id,
        "recognizer_version": backend.version,
        "window_s": WINDOW_S,
        "hop_s": HOP_S,
        "native_hop_s": info.get("native_hop_s"),
        "source_wav": os.path.basename(str(wav_path)),
    }
    with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return AdapterOutput(str(out_path), sidecar_path, len(decoded))


def validate(path):
    """Schema checks for an interchange CSV.

    Returns a list of (check_name, passed, detail) triples covering header
    and label order, column counts, decoded presence, frame timing, and
    per-row softmax fidelity.
    """
    checks = []

    def check(name, passed, detail=""):
        checks.append((name, bool(passed), detail))

    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        check("readable", False, str(exc))
        return checks
    check("readable", True)
    if not lines:
        check("header", False, "empty file")
        return checks

    header = tuple(lines[0].split(","))
    check(
        "label order",
        header == HEADER,
        "" if header == HEADER else f"header differs from canonical at "
        f"{next((i for i, (a, b) in enumerate(zip(header, HEADER)) if a != b), len(header))}",
    )

    ok_cols = ok_decoded = ok_hop = ok_softmax = True
    detail_cols = detail_decoded = detail_hop = detail_softmax = ""
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(HEADER):
            ok_cols, detail_cols = False, f"line {lineno}: {len(cells)} columns"
            break
        try:
            start, end = float(cells[0]), float(cells[1])
            row = np.array([float(c) for c in cells[3:]])
        except ValueError as exc:
            ok_cols, detail_cols = False, f"line {lineno}: {exc}"
            break
        i = lineno - 2
        if abs(start - i * HOP_S) > 1e-6 or abs(end - start - WINDOW_S) > 1e-6:
            ok_hop, detail_hop = False, f"line {lineno}: start {start}, end {end}"
        if cells[2] not in CANONICAL_LABELS:
            ok_decoded, detail_decoded = False, f"line {lineno}: {cells[2]!r}"
        if not np.all(np.isfinite(row)):
            ok_softmax, detail_softmax = False, f"line {lineno}: non-finite logit"
        else:
            exps = np.exp(row - row.max())
            total = exps.sum() and float((exps / exps.sum()).sum())
            if not math.isclose(total, 1.0, abs_tol=1e-6):
                ok_softmax, detail_softmax = False, f"line {lineno}: sum {total}"
    check("column count", ok_cols, detail_cols)
    check("frame timing", ok_hop, detail_hop)
    check("decoded labels", ok_decoded, detail_decoded)
    check("softmax fidelity", ok_softmax, detail_softmax)
    check("non-empty", len(lines) > 1, "" if len(lines) > 1 else "no data rows")
    return checks
