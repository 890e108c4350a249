"""Phone posteriorgram ingestion and corner-vowel frame selection.

The interchange file is UTF-8 CSV with header
``start_s,end_s,decoded,<40 phone labels>`` where the 40 columns are raw
logits in the canonical order below, one row per 30 ms frame.
"""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PosteriorgramFormatError

# Canonical 40-label English phone inventory (39 ARPABET phonemes plus the
# recognizer-specific reduced vowel IX), alphabetical.
CANONICAL_LABELS = (
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IX", "IY", "JH",
    "K", "L", "M", "N", "NG", "OW", "OY", "P", "R", "S",
    "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH",
)
_LABEL_INDEX = {label: i for i, label in enumerate(CANONICAL_LABELS)}

EXPECTED_HOP_S = 0.030
_HOP_TOL_S = 1e-6

CORNER_LABELS = {"a": "AA", "i": "IY", "u": "UW"}


@dataclass(frozen=True)
class PhoneSets:
    """Extended phone sets counted toward each corner vowel (Table-style defaults)."""

    z_a: frozenset = frozenset({"AA", "AE", "AH", "AW", "AY"})
    z_i: frozenset = frozenset({"IY", "IX", "IH"})
    z_u: frozenset = frozenset({"UW", "UH", "OW"})

    def __post_init__(self):
        for name, s in (("z_a", self.z_a), ("z_i", self.z_i), ("z_u", self.z_u)):
            object.__setattr__(self, name, frozenset(s))
            if not s:
                raise ValueError(f"{name} must be non-empty")

    def corner_only(self):
        return PhoneSets(frozenset({"AA"}), frozenset({"IY"}), frozenset({"UW"}))

    def by_vowel(self):
        return {"a": self.z_a, "i": self.z_i, "u": self.z_u}


@dataclass(frozen=True)
class SelectionConfig:
    k: int = 4
    alpha: float = 0.2
    corner_only: bool = False

    def __post_init__(self):
        if not (1 <= self.k <= len(CANONICAL_LABELS)):
            raise ValueError(f"k must be in [1, 40], got {self.k}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class Posteriorgram:
    start_s: np.ndarray
    end_s: np.ndarray
    logits: np.ndarray  # frames x 40
    decoded: tuple
    labels: tuple = CANONICAL_LABELS

    def __post_init__(self):
        object.__setattr__(self, "start_s", np.asarray(self.start_s, dtype=np.float64))
        object.__setattr__(self, "end_s", np.asarray(self.end_s, dtype=np.float64))
        object.__setattr__(self, "logits", np.asarray(self.logits, dtype=np.float64))
        if len(self.labels) != len(set(self.labels)):
            raise ValueError("phone labels must be unique")
        if self.logits.ndim != 2 or self.logits.shape[1] != len(self.labels):
            raise ValueError(f"logits must be frames x {len(self.labels)}")
        if not np.all(np.isfinite(self.logits)):
            raise ValueError("non-finite logits")
        if len(self.decoded) != self.logits.shape[0]:
            raise ValueError("decoded length does not match frame count")

    @property
    def count(self):
        return self.logits.shape[0]

    def frame_centers(self):
        return (self.start_s + self.end_s) / 2.0


@dataclass(frozen=True)
class VowelFrameSets:
    s_a: frozenset
    s_i: frozenset
    s_u: frozenset

    def by_vowel(self):
        return {"a": self.s_a, "i": self.s_i, "u": self.s_u}

    def restrict(self, allowed):
        """Intersect every set with an allowed frame-index collection."""
        allowed = frozenset(allowed)
        return VowelFrameSets(self.s_a & allowed, self.s_i & allowed, self.s_u & allowed)


def read_posteriorgram(path):
    """Parse and validate a posteriorgram interchange CSV."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PosteriorgramFormatError("empty file", line=1)
        expected = ["start_s", "end_s", "decoded", *CANONICAL_LABELS]
        if header != expected:
            if len(header) != len(expected):
                missing = sorted(set(expected) - set(header))
                raise PosteriorgramFormatError(
                    f"expected {len(expected)} columns, got {len(header)}"
                    + (f"; missing {', '.join(missing)}" if missing else ""),
                    line=1,
                )
            raise PosteriorgramFormatError(
                "header does not match canonical label order", line=1
            )
        starts, ends, logit_rows, decoded = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise PosteriorgramFormatError(
                    f"expected {len(expected)} fields, got {len(row)}", line=lineno
                )
            try:
                starts.append(float(row[0]))
                ends.append(float(row[1]))
                logit_rows.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise PosteriorgramFormatError(f"parse failure: {exc}", line=lineno)
            if not row[2]:
                raise PosteriorgramFormatError("missing decoded label", line=lineno)
            decoded.append(row[2])
    if not starts:
        raise PosteriorgramFormatError("no frames", line=2)

    starts_arr = np.array(starts)
    if np.any(np.diff(starts_arr) <= 0):
        bad = int(np.argmax(np.diff(starts_arr) <= 0)) + 3
        raise PosteriorgramFormatError("non-monotone frame times", line=bad)
    hops = np.diff(starts_arr)
    if hops.size and np.any(np.abs(hops - EXPECTED_HOP_S) > _HOP_TOL_S):
        bad = int(np.argmax(np.abs(hops - EXPECTED_HOP_S) > _HOP_TOL_S)) + 3
        raise PosteriorgramFormatError(
            f"unexpected hop {hops[np.abs(hops - EXPECTED_HOP_S).argmax()]:.6f} s "
            f"(expected {EXPECTED_HOP_S} s)",
            line=bad,
        )
    try:
        return Posteriorgram(starts_arr, np.array(ends), np.array(logit_rows), tuple(decoded))
    except ValueError as exc:
        raise PosteriorgramFormatError(str(exc))


def write_posteriorgram(pg, path):
    """Write the interchange CSV (LF endings, '.' decimal, >=6 sig digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("start_s,end_s,decoded," + ",".join(pg.labels) + "\n")
        for i in range(pg.count):
            logit_str = ",".join(f"{v:.10g}" for v in pg.logits[i])
            fh.write(f"{pg.start_s[i]:.10g},{pg.end_s[i]:.10g},{pg.decoded[i]},{logit_str}\n")


def softmax_rows(logits):
    """Row-wise softmax with max-subtraction for numerical stability."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def derive_decoded(pg):
    """Fallback top-1-per-frame decoding when the decoded column is absent."""
    idx = np.argmax(pg.logits, axis=1)
    return tuple(pg.labels[i] for i in idx)


def _top_k_indices(posterior_row, labels, k):
    # ties broken by ascending label so selection is deterministic
    order = sorted(range(len(labels)), key=lambda i: (-posterior_row[i], labels[i]))
    return order[:k]


_warned_missing_labels = set()


def _resolve_sets(sets, labels):
    known = set(labels)
    resolved = {}
    for vowel, phones in sets.by_vowel().items():
        missing = phones - known
        if missing:
            key = (vowel, tuple(sorted(missing)))
            if key not in _warned_missing_labels:
                _warned_missing_labels.add(key)
                warnings.warn(
                    f"phone set for /{vowel}/ contains labels absent from the "
                    f"inventory (ignored): {', '.join(sorted(missing))}"
                )
        resolved[vowel] = phones & known
    return resolved


def select_corner_frames(pg, sets=PhoneSets(), cfg=SelectionConfig()):
    """Select frame sets S_a, S_i, S_u by the two screening criteria.

    A frame enters S_v if its decoded phone lies in Z_v (criterion 1), or if
    any phone of Z_v is among its top-k posteriors with posterior > alpha
    (criterion 2).
    """
    if cfg.corner_only:
        sets = sets.corner_only()
    resolved = _resolve_sets(sets, pg.labels)
    posteriors = softmax_rows(pg.logits)
    selected = {"a": set(), "i": set(), "u": set()}
    for t in range(pg.count):
        row = posteriors[t]
        top = _top_k_indices(row, pg.labels, cfg.k)
        top_labels = {pg.labels[i] for i in top if row[i] > cfg.alpha}
        for vowel, phones in resolved.items():
            if pg.decoded[t] in phones or (phones & top_labels):
                selected[vowel].add(t)
    return VowelFrameSets(
        frozenset(selected["a"]), frozenset(selected["i"]), frozenset(selected["u"])
    )


def selection_stats(sets):
    """Per-vowel frame counts plus pairwise and triple overlap counts."""
    return {
        "n_a": len(sets.s_a),
        "n_i": len(sets.s_i),
        "n_u": len(sets.s_u),
        "overlap_ai": len(sets.s_a & sets.s_i),
        "overlap_au": len(sets.s_a & sets.s_u),
        "overlap_iu": len(sets.s_i & sets.s_u),
        "overlap_aiu": len(sets.s_a & sets.s_i & sets.s_u),
    }
