"""Automatic vowel-articulation assessment from speech recordings.

Computes the clinical vowel articulation features VSA, VAI, FCR, and
F2i/F2u from recordings, using phone-posteriorgram-driven corner-vowel
frame selection and Burg linear-prediction formant estimation, together
with the statistical tooling for cohort comparisons.
"""

from .audio import FrameGrid, Waveform, build_grid, load_wav, resample, trim_edges
from .errors import VowelArtError
from .features import (
    ArticulationFeatures,
    Estimator,
    VowelRepresentatives,
    aggregate,
    f2_ratio,
    fcr,
    feature_suite,
    percentile,
    vai,
    vsa,
)
from .formant import (
    ErrorBoundary,
    FormantConfig,
    FormantTrack,
    burg_coefficients,
    screen_errors,
    track_formants,
)
from .pipeline import (
    PipelineConfig,
    RecordingResult,
    emit_reports,
    run_cohort,
    run_manual,
    run_recording,
)
from .posterior import (
    CANONICAL_LABELS,
    PhoneSets,
    Posteriorgram,
    SelectionConfig,
    VowelFrameSets,
    read_posteriorgram,
    select_corner_frames,
    softmax_rows,
    write_posteriorgram,
)
from .stats import (
    TestResult,
    bonferroni,
    group_summary,
    pearson,
    significance_stars,
    unpaired_t,
    williams_t,
)
from .synth import CentralizationSpec, VowelSpec, synth_cohort, synth_vowel

__version__ = "0.1.0"
