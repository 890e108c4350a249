"""Corner-vowel representative formants and articulation features.

Features follow the standard clinical definitions:

    VSA  = 1/2 |F1i(F2a-F2u) + F1a(F2u-F2i) + F1u(F2i-F2a)|   [Hz^2]
    VAI  = (F1a + F2i) / (F2a + F1i + F1u + F2u)
    FCR  = 1 / VAI
    F2r  = F2i / F2u

Under a percentile estimator the hi percentile is taken for the formants
expected to be high at the vowel target (F1 of /a/, F2 of /i/) and the lo
percentile (lo = 100 - hi) for all others, counteracting the centralization
bias of automatic frame selection.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyVowelSetError, VowelArtError

PERCENTILE_HIS = (50, 70, 90)
ESTIMATOR_TAGS = ("mean", "p50", "p70", "p90")


@dataclass(frozen=True)
class Estimator:
    kind: str  # "mean" | "percentile"
    hi: int = 50

    def __post_init__(self):
        if self.kind not in ("mean", "percentile"):
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.kind == "percentile" and not (50 <= self.hi < 100):
            raise ValueError(f"hi must be in [50, 100), got {self.hi}")

    @property
    def lo(self):
        return 100 - self.hi

    @property
    def tag(self):
        return "mean" if self.kind == "mean" else f"p{self.hi}"


ESTIMATORS = (
    Estimator("mean"),
    Estimator("percentile", 50),
    Estimator("percentile", 70),
    Estimator("percentile", 90),
)


@dataclass(frozen=True)
class VowelRepresentatives:
    f1a: float
    f2a: float
    f1i: float
    f2i: float
    f1u: float
    f2u: float

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if not (np.isfinite(v) and v > 0):
                raise VowelArtError(f"representative {name} must be positive, got {v}")

    def scaled(self, c):
        return VowelRepresentatives(*(c * v for v in self.as_tuple()))

    def as_tuple(self):
        return (self.f1a, self.f2a, self.f1i, self.f2i, self.f1u, self.f2u)


@dataclass(frozen=True)
class ArticulationFeatures:
    vai: float
    vsa: float
    fcr: float
    f2i_f2u: float
    estimator: str


def percentile(values, p):
    """Linear-interpolation percentile on (n-1) ranks."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise VowelArtError("percentile of empty sequence")
    if not np.all(np.isfinite(v)):
        raise VowelArtError("non-finite values in percentile input")
    if not (0 <= p <= 100):
        raise VowelArtError(f"percentile p must be in [0, 100], got {p}")
    v = np.sort(v)
    h = (v.size - 1) * p / 100.0
    lo = int(np.floor(h))
    hi = min(lo + 1, v.size - 1)
    return float(v[lo] + (h - lo) * (v[hi] - v[lo]))


def _collect(track, indices, exclude=None):
    f1s, f2s = [], []
    for i in sorted(indices):
        if i < 0 or i >= track.count:
            continue
        fr = track.frames[i]
        if not fr.valid:
            continue
        if exclude is not None and exclude[i]:
            continue
        f1s.append(fr.f1_hz)
        f2s.append(fr.f2_hz)
    return np.array(f1s), np.array(f2s)


def aggregate(track, sets, est, error_flags=None):
    """One (F1, F2) representative per corner vowel from selected frames.

    Mean estimator: per-vowel means. Percentile estimator: /a/ gets
    (P_hi(F1), P_lo(F2)), /i/ gets (P_lo(F1), P_hi(F2)), /u/ gets
    (P_lo(F1), P_lo(F2)). Invalid frames are always excluded; frames
    flagged in `error_flags` are excluded when it is given.
    """
    per_vowel = {}
    for vowel, indices in sets.by_vowel().items():
        f1s, f2s = _collect(track, indices, error_flags)
        if f1s.size == 0:
            raise EmptyVowelSetError(vowel)
        per_vowel[vowel] = (f1s, f2s)

    def rep(vowel, hi_f1, hi_f2):
        f1s, f2s = per_vowel[vowel]
        if est.kind == "mean":
            return float(f1s.mean()), float(f2s.mean())
        p_f1 = est.hi if hi_f1 else est.lo
        p_f2 = est.hi if hi_f2 else est.lo
        return percentile(f1s, p_f1), percentile(f2s, p_f2)

    f1a, f2a = rep("a", hi_f1=True, hi_f2=False)
    f1i, f2i = rep("i", hi_f1=False, hi_f2=True)
    f1u, f2u = rep("u", hi_f1=False, hi_f2=False)
    return VowelRepresentatives(f1a, f2a, f1i, f2i, f1u, f2u)


def vsa(reps):
    """Triangle area of the corner vowels in the F1-F2 plane (Hz^2)."""
    return 0.5 * abs(
        reps.f1i * (reps.f2a - reps.f2u)
        + reps.f1a * (reps.f2u - reps.f2i)
        + reps.f1u * (reps.f2i - reps.f2a)
    )


def vai(reps):
    """Vowel articulation index."""
    den = reps.f2a + reps.f1i + reps.f1u + reps.f2u
    if den <= 0:
        raise VowelArtError(f"VAI denominator must be positive, got {den}")
    return (reps.f1a + reps.f2i) / den


def fcr(reps):
    """Formant centralization ratio, the reciprocal of VAI."""
    v = vai(reps)
    if v == 0:
        raise VowelArtError("VAI is zero; FCR undefined")
    return 1.0 / v


def f2_ratio(reps):
    """Second-formant ratio F2i / F2u."""
    if reps.f2u <= 0:
        raise VowelArtError("F2u must be positive")
    return reps.f2i / reps.f2u


def features_from_reps(reps, tag):
    return ArticulationFeatures(
        vai=vai(reps), vsa=vsa(reps), fcr=fcr(reps), f2i_f2u=f2_ratio(reps), estimator=tag
    )


def feature_suite(track, sets, error_flags=None):
    """All four features under mean and 50/70/90 percentile estimators.

    Returns {tag: (ArticulationFeatures, VowelRepresentatives)}.
    """
    out = {}
    for est in ESTIMATORS:
        reps = aggregate(track, sets, est, error_flags)
        out[est.tag] = (features_from_reps(reps, est.tag), reps)
    return out
