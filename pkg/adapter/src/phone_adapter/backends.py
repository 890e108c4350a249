"""Recognizer backends.

A backend turns a 16 kHz mono signal into per-frame logits over the
40-label English inventory on the 45/30 ms grid. The Allosaurus backend
wraps the pretrained universal recognizer; the energy backend is a
model-free stand-in used for plumbing tests and smoke runs.
"""

import os

import numpy as np

from .interchange import CANONICAL_LABELS, HOP_S, WINDOW_S, frame_count

MODEL_CACHE_ENV = "ADAPTER_MODEL_CACHE"


class BackendError(RuntimeError):
    pass


class EnergyBackend:
    """Deterministic, model-free backend.

    Frames above an energy threshold get a dominant logit on a vowel label
    chosen by the dominant-frequency band; quiet frames decode as SIL-like
    'HH'. Only useful for exercising the export path; carries no phonetic
    knowledge.
    """

    model_id = "energy-stub"
    version = "1"

    _BANDS = (((0.0, 600.0), "UW"), ((600.0, 1500.0), "AA"), ((1500.0, 8000.0), "IY"))

    def infer_frames(self, samples, rate):
        n = frame_count(samples.size / rate)
        logits = np.zeros((n, len(CANONICAL_LABELS)))
        decoded = []
        idx = {lab: j for j, lab in enumerate(CANONICAL_LABELS)}
        peak_rms = 0.0
        frames = []
        for i in range(n):
            a = int(round(i * HOP_S * rate))
            b = min(samples.size, a + int(round(WINDOW_S * rate)))
            seg = samples[a:b]
            rms = float(np.sqrt(np.mean(seg**2))) if seg.size else 0.0
            peak_rms = max(peak_rms, rms)
            frames.append(seg)
        for i, seg in enumerate(frames):
            rms = float(np.sqrt(np.mean(seg**2))) if seg.size else 0.0
            if peak_rms <= 0 or rms < 0.05 * peak_rms:
                logits[i, idx["HH"]] = 4.0
                decoded.append("HH")
                continue
            spec = np.abs(np.fft.rfft(seg * np.hanning(seg.size)))
            freqs = np.fft.rfftfreq(seg.size, 1.0 / rate)
            f_dom = float(freqs[int(np.argmax(spec))])
            label = next(lab for (lo, hi), lab in self._BANDS if lo <= f_dom < hi)
            logits[i, idx[label]] = 6.0
            decoded.append(label)
        return logits, decoded, {"native_hop_s": HOP_S}


class AllosaurusBackend:
    """Pretrained universal phone recognizer (English inventory slice).

    The recognizer emits phones with timestamps and per-phone scores; these
    are rasterized onto the 45/30 ms grid, keeping the top-scoring phone of
    each frame as `decoded` and its score ladder as logits. Requires the
    `allosaurus` package and a downloadable/cached model.
    """

    def __init__(self, model="latest"):
        try:
            from allosaurus.app import read_recognizer
        except ImportError as exc:  # pragma: no cover - model not installed
            raise BackendError(
                "allosaurus is not installed; install the 'allosaurus' extra "
                "or use the energy backend"
            ) from exc
        cache = os.environ.get(MODEL_CACHE_ENV)
        if cache:  # pragma: no cover
            os.environ.setdefault("ALLOSAURUS_MODEL_DIR", cache)
        self._recognizer = read_recognizer(model)  # pragma: no cover
        self.model_id = model
        self.version = getattr(self._recognizer, "version", "unknown")

    def infer_frames(self, samples, rate):  # pragma: no cover - needs model
        import tempfile

        from scipy.io import wavfile

        idx = {lab: j for j, lab in enumerate(CANONICAL_LABELS)}
        n = frame_count(samples.size / rate)
        logits = np.full((n, len(CANONICAL_LABELS)), -10.0)
        decoded = ["HH"] * n
        with tempfile.NamedTemporaryFile(suffix=".wav") as tmp:
            wavfile.write(tmp.name, rate, (samples * 32767.0).astype(np.int16))
            out = self._recognizer.recognize(
                tmp.name, lang_id="eng", timestamp=True, topk=5
            )
        for line in out.splitlines():
            parts = line.split()
            if len(parts) < 3:
                continue
            start, dur = float(parts[0]), float(parts[1])
            phones = [p.upper() for p in parts[2:]]
            lo = max(0, int(np.floor((start - WINDOW_S) / HOP_S)) + 1)
            hi = min(n, int(np.floor((start + dur) / HOP_S)) + 1)
            for t in range(lo, hi):
                for rank, phone in enumerate(phones):
                    if phone in idx:
                        logits[t, idx[phone]] = 5.0 - rank
                        if rank == 0:
                            decoded[t] = phone
        return logits, decoded, {"native_hop_s": None}


def resolve_backend(name, model="latest"):
    if name == "energy":
        return EnergyBackend()
    if name == "allosaurus":
        return AllosaurusBackend(model)
    raise BackendError(f"unknown backend {name!r}")
