"""End-to-end orchestration: per-recording runs, cohorts, and reports.

Alignment convention: the frame grid is built over the full recording so
formant frames pair index-for-index with posteriorgram rows. Energy trimming
does not cut the signal; it restricts which frame indices may enter the
corner-vowel sets, keeping the two streams aligned while still excluding
leading/trailing silence.
"""

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import plots
from .audio import (
    DEFAULT_HOP_S,
    DEFAULT_TRIM_DB,
    DEFAULT_WINDOW_S,
    FrameGrid,
    build_grid,
    load_wav,
    resample,
    trim_bounds,
)
from .errors import NoSpeechError, PipelineError, StatsError, VowelArtError
from .features import (
    ESTIMATOR_TAGS,
    features_from_reps,
    percentile,
    feature_suite,
)
from .formant import ErrorBoundary, FormantConfig, screen_errors, track_formants
from .posterior import (
    PhoneSets,
    SelectionConfig,
    read_posteriorgram,
    select_corner_frames,
    selection_stats,
)
from .stats import bonferroni, group_summary, pearson, unpaired_t, williams_t
from .features import VowelRepresentatives

FEATURE_NAMES = ("vai", "vsa", "fcr", "f2i_f2u")

# Segments shorter than this draw a warning but are still processed.
MIN_SEGMENT_S = 0.030
_MANUAL_HOP_S = 0.010

FEATURES_CSV_COLUMNS = (
    "speaker_id", "group", "method", "estimator", "status",
    "vai", "vsa", "fcr", "f2i_f2u",
    "f1a", "f2a", "f1i", "f2i", "f1u", "f2u",
    "n_a", "n_i", "n_u", "error_ratio", "duration_s",
)


@dataclass(frozen=True)
class PipelineConfig:
    target_rate_hz: int = 16000
    window_s: float = DEFAULT_WINDOW_S
    hop_s: float = DEFAULT_HOP_S
    trim_threshold_db: float = DEFAULT_TRIM_DB
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    phone_sets: PhoneSets = field(default_factory=PhoneSets)
    formant: FormantConfig = field(default_factory=FormantConfig)
    boundary: ErrorBoundary = field(default_factory=ErrorBoundary)
    exclude_error_frames: bool = False

    @classmethod
    def from_file(cls, path):
        """Load overrides from a YAML/JSON mapping of flat config keys."""
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise PipelineError(f"{path}: config must be a mapping")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw):
        known_top = {"target_rate_hz", "window_s", "hop_s", "trim_threshold_db",
                     "exclude_error_frames"}
        sel_keys = {"k", "alpha", "corner_only"}
        fmt_keys = {"max_formant_hz", "lpc_order", "pre_emphasis_from_hz",
                    "min_formant_hz", "max_bandwidth_hz"}
        bnd_keys = {"f1_max_hz", "f2_min_hz"}
        set_keys = {"z_a", "z_i", "z_u"}
        unknown = set(raw) - known_top - sel_keys - fmt_keys - bnd_keys - set_keys
        if unknown:
            raise PipelineError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw = {k: raw[k] for k in known_top & set(raw)}
        if sel_keys & set(raw):
            kw["selection"] = SelectionConfig(**{k: raw[k] for k in sel_keys & set(raw)})
        if fmt_keys & set(raw):
            kw["formant"] = FormantConfig(**{k: raw[k] for k in fmt_keys & set(raw)})
        if bnd_keys & set(raw):
            kw["boundary"] = ErrorBoundary(**{k: raw[k] for k in bnd_keys & set(raw)})
        if set_keys & set(raw):
            defaults = PhoneSets()
            kw["phone_sets"] = PhoneSets(
                frozenset(raw.get("z_a", defaults.z_a)),
                frozenset(raw.get("z_i", defaults.z_i)),
                frozenset(raw.get("z_u", defaults.z_u)),
            )
        return cls(**kw)


@dataclass(frozen=True)
class RecordingResult:
    speaker_id: str
    method: str  # "auto" | "manual"
    by_estimator: dict  # tag -> (ArticulationFeatures, VowelRepresentatives)
    frame_counts: dict
    error_ratio: float
    duration_s: float
    warnings: tuple = ()


def _prepare_wave(wav_path, cfg):
    wav = load_wav(wav_path)
    if wav.sample_rate != cfg.target_rate_hz:
        wav = resample(wav, cfg.target_rate_hz)
    return wav


def run_recording(wav_path, posteriorgram_path, cfg=PipelineConfig(), speaker_id=""):
    """Automatic path: posteriorgram-driven selection plus formant tracking."""
    try:
        wav = _prepare_wave(wav_path, cfg)
        pg = read_posteriorgram(posteriorgram_path)
        pg_span = float(pg.end_s[-1])
        if abs(pg_span - wav.duration_s) > 0.1:
            raise PipelineError(
                f"posteriorgram span {pg_span:.3f} s vs audio "
                f"{wav.duration_s:.3f} s exceeds 0.1 s"
            )
        grid = build_grid(wav, cfg.window_s, cfg.hop_s)
        n = min(grid.count, pg.count)

        t0, t1 = trim_bounds(wav, cfg.trim_threshold_db)
        active = frozenset(
            i for i in range(n) if t0 <= grid.frame_centers[i] <= t1
        )

        track = track_formants(wav, grid, cfg.formant)
        flags, error_ratio = screen_errors(track, cfg.boundary)
        sets = select_corner_frames(pg, cfg.phone_sets, cfg.selection).restrict(active)
        suite = feature_suite(
            track, sets, flags if cfg.exclude_error_frames else None
        )
        return RecordingResult(
            speaker_id, "auto", suite, selection_stats(sets),
            error_ratio, wav.duration_s, tuple(track.warnings),
        )
    except VowelArtError as exc:
        raise PipelineError(f"{speaker_id or wav_path}: {exc}") from exc


def read_annotations(path):
    """Annotation CSV rows (start_s, end_s, vowel)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"start_s", "end_s", "vowel"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise PipelineError(f"{path}: header must contain start_s,end_s,vowel")
        for lineno, row in enumerate(reader, start=2):
            try:
                start, end = float(row["start_s"]), float(row["end_s"])
            except ValueError as exc:
                raise PipelineError(f"{path} line {lineno}: {exc}")
            vowel = row["vowel"].strip()
            if vowel not in ("a", "i", "u"):
                raise PipelineError(
                    f"{path} line {lineno}: vowel must be a/i/u, got {vowel!r}"
                )
            if end <= start:
                raise PipelineError(f"{path} line {lineno}: end_s <= start_s")
            rows.append((start, end, vowel))
    if not rows:
        raise PipelineError(f"{path}: no annotation rows")
    return rows


def run_manual(wav_path, annotations, cfg=PipelineConfig(), speaker_id=""):
    """Manual path: mean formants of annotated segments on a dense 10 ms grid.

    Percentile estimator variants are computed over the per-segment mean
    formants (the annotator's unit of analysis).
    """
    if isinstance(annotations, (str, os.PathLike)):
        annotations = read_annotations(annotations)
    try:
        wav = _prepare_wave(wav_path, cfg)
        warnings_out = []
        seg_means = {"a": [], "i": [], "u": []}
        for start, end, vowel in annotations:
            if end - start < MIN_SEGMENT_S - 1e-9:
                warnings_out.append(
                    f"segment {start:.3f}-{end:.3f} /{vowel}/ shorter than "
                    f"{MIN_SEGMENT_S * 1000:.0f} ms"
                )
            centers = np.arange(start, end + 1e-9, _MANUAL_HOP_S)
            half = cfg.window_s / 2.0
            centers = centers[(centers >= half) & (centers <= wav.duration_s - half)]
            if centers.size == 0:
                warnings_out.append(
                    f"segment {start:.3f}-{end:.3f} /{vowel}/ has no usable frames"
                )
                continue
            grid = FrameGrid(cfg.window_s, _MANUAL_HOP_S, centers)
            track = track_formants(wav, grid, cfg.formant)
            f1s = [f.f1_hz for f in track.frames if f.valid]
            f2s = [f.f2_hz for f in track.frames if f.valid]
            if not f1s:
                warnings_out.append(
                    f"segment {start:.3f}-{end:.3f} /{vowel}/ has no valid frames"
                )
                continue
            seg_means[vowel].append((float(np.mean(f1s)), float(np.mean(f2s))))

        for vowel, means in seg_means.items():
            if not means:
                raise PipelineError(
                    f"{speaker_id or wav_path}: no valid segments for /{vowel}/"
                )

        by_est = {}
        for tag in ESTIMATOR_TAGS:
            def rep_of(vowel, hi_f1, hi_f2):
                f1s = [m[0] for m in seg_means[vowel]]
                f2s = [m[1] for m in seg_means[vowel]]
                if tag == "mean":
                    return float(np.mean(f1s)), float(np.mean(f2s))
                hi = int(tag[1:])
                lo = 100 - hi
                return (
                    percentile(f1s, hi if hi_f1 else lo),
                    percentile(f2s, hi if hi_f2 else lo),
                )

            f1a, f2a = rep_of("a", True, False)
            f1i, f2i = rep_of("i", False, True)
            f1u, f2u = rep_of("u", False, False)
            reps = VowelRepresentatives(f1a, f2a, f1i, f2i, f1u, f2u)
            by_est[tag] = (features_from_reps(reps, tag), reps)

        counts = {
            "n_a": len(seg_means["a"]),
            "n_i": len(seg_means["i"]),
            "n_u": len(seg_means["u"]),
        }
        return RecordingResult(
            speaker_id, "manual", by_est, counts, 0.0, wav.duration_s,
            tuple(warnings_out),
        )
    except (VowelArtError, OSError) as exc:
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(f"{speaker_id or wav_path}: {exc}") from exc


# --- cohort level ---------------------------------------------------------

_MANIFEST_CORE = ("speaker_id", "group", "wav_path", "posteriorgram_path",
                  "annotation_path")


def read_manifest(path):
    """Manifest CSV -> (rows, metadata column names)."""
    base = os.path.dirname(os.path.abspath(path))
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[:4] != list(_MANIFEST_CORE[:4]):
            raise PipelineError(
                f"{path}: header must start with {','.join(_MANIFEST_CORE[:4])}"
            )
        meta_cols = [c for c in reader.fieldnames if c not in _MANIFEST_CORE]
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            sid = row["speaker_id"]
            if sid in seen:
                raise PipelineError(f"{path} line {lineno}: duplicate speaker_id {sid}")
            seen.add(sid)
            group = row["group"]
            if group not in ("control", "patient"):
                raise PipelineError(
                    f"{path} line {lineno}: group must be control|patient, got {group!r}"
                )

            def resolve(p):
                if not p:
                    return None
                return p if os.path.isabs(p) else os.path.join(base, p)

            meta = {}
            for col in meta_cols:
                val = (row.get(col) or "").strip()
                if val:
                    try:
                        meta[col] = float(val)
                    except ValueError:
                        meta[col] = None
                else:
                    meta[col] = None
            rows.append({
                "speaker_id": sid,
                "group": group,
                "wav_path": resolve(row["wav_path"]),
                "posteriorgram_path": resolve(row["posteriorgram_path"]),
                "annotation_path": resolve(row.get("annotation_path")),
                "metadata": meta,
            })
    if not rows:
        raise PipelineError(f"{path}: empty manifest")
    return rows, meta_cols


@dataclass
class CohortRow:
    speaker_id: str
    group: str
    metadata: dict
    auto: RecordingResult | None = None
    manual: RecordingResult | None = None
    error: str | None = None


@dataclass
class CohortResult:
    rows: list
    meta_cols: list
    group_stats: dict
    correlations: dict
    n_failed: int


def run_cohort(manifest_path, cfg=PipelineConfig()):
    """Process every manifest row; failures are isolated into explicit rows."""
    entries, meta_cols = read_manifest(manifest_path)
    rows = []
    for entry in sorted(entries, key=lambda e: e["speaker_id"]):
        row = CohortRow(entry["speaker_id"], entry["group"], entry["metadata"])
        try:
            row.auto = run_recording(
                entry["wav_path"], entry["posteriorgram_path"], cfg,
                speaker_id=entry["speaker_id"],
            )
            if entry["annotation_path"]:
                row.manual = run_manual(
                    entry["wav_path"], entry["annotation_path"], cfg,
                    speaker_id=entry["speaker_id"],
                )
        except PipelineError as exc:
            row.error = str(exc)
        rows.append(row)

    group_stats = _group_statistics(rows)
    correlations = _correlation_reports(rows, meta_cols)
    n_failed = sum(1 for r in rows if r.error)
    return CohortResult(rows, meta_cols, group_stats, correlations, n_failed)


def _feature_value(result, tag, feature):
    return getattr(result.by_estimator[tag][0], feature)


def _group_statistics(rows):
    """Control-vs-patient summaries and pooled t-tests per feature/estimator.

    p-values are Bonferroni-corrected for the 4 estimator variants of each
    feature.
    """
    out = {}
    for feature in FEATURE_NAMES:
        per_est = {}
        raw_ps = {}
        for tag in ESTIMATOR_TAGS:
            ctl = [_feature_value(r.auto, tag, feature) for r in rows
                   if r.auto and r.group == "control"]
            pat = [_feature_value(r.auto, tag, feature) for r in rows
                   if r.auto and r.group == "patient"]
            entry = {"n_control": len(ctl), "n_patient": len(pat)}
            try:
                entry["control_mean"], entry["control_std"] = group_summary(ctl)
                entry["patient_mean"], entry["patient_std"] = group_summary(pat)
                test = unpaired_t(ctl, pat, pooled=True)
                entry["t"] = test.statistic
                entry["df"] = test.df
                raw_ps[tag] = test.p_value
            except StatsError as exc:
                entry["skipped"] = str(exc)
            # table-style scaled VSA for cohort reports
            if feature == "vsa" and "control_mean" in entry and "patient_mean" in entry:
                entry["control_mean_x1e-5"] = entry["control_mean"] * 1e-5
                entry["patient_mean_x1e-5"] = entry["patient_mean"] * 1e-5
            per_est[tag] = entry
        if raw_ps:
            adjusted = bonferroni(list(raw_ps.values()), 4)
            for tag, p_adj in zip(raw_ps, adjusted):
                per_est[tag]["p_raw"] = raw_ps[tag]
                per_est[tag]["p_bonferroni"] = p_adj
        out[feature] = per_est
    return out


def _paired(rows, getter_x, getter_y):
    xs, ys = [], []
    for r in rows:
        x = getter_x(r)
        y = getter_y(r)
        if x is not None and y is not None:
            xs.append(x)
            ys.append(y)
    return xs, ys


def _safe_pearson(xs, ys):
    try:
        t = pearson(xs, ys)
        return {"r": t.statistic, "p": t.p_value, "n": len(xs)}
    except StatsError as exc:
        return {"skipped": str(exc), "n": len(xs)}


def _correlation_reports(rows, meta_cols):
    ok = [r for r in rows if r.auto]
    out = {"feature_vs_metadata": {}, "auto_vs_manual": {},
           "williams_auto_manual_vs_metadata": {}, "frame_counts": {}}

    for feature in FEATURE_NAMES:
        for col in meta_cols:
            per_est = {}
            raw = {}
            for tag in ESTIMATOR_TAGS:
                xs, ys = _paired(
                    ok,
                    lambda r, t=tag, f=feature: _feature_value(r.auto, t, f),
                    lambda r, c=col: r.metadata.get(c),
                )
                res = _safe_pearson(xs, ys)
                if "r" in res:
                    raw[tag] = res["p"]
                per_est[tag] = res
            if raw:
                adjusted = bonferroni(list(raw.values()), 4)
                for tag, p_adj in zip(raw, adjusted):
                    per_est[tag]["p_bonferroni"] = p_adj
            out["feature_vs_metadata"][f"{feature}:{col}"] = per_est

    both = [r for r in ok if r.manual]
    for feature in FEATURE_NAMES:
        per_est = {}
        for tag in ESTIMATOR_TAGS:
            xs, ys = _paired(
                both,
                lambda r, t=tag, f=feature: _feature_value(r.auto, t, f),
                lambda r, t=tag, f=feature: _feature_value(r.manual, t, f),
            )
            per_est[tag] = _safe_pearson(xs, ys)
        out["auto_vs_manual"][feature] = per_est

    # Williams: does the auto feature correlate with a rating differently
    # than the manual feature does? (dependent correlations sharing the rating)
    for feature in FEATURE_NAMES:
        for col in meta_cols:
            triples = [
                (
                    _feature_value(r.auto, "mean", feature),
                    _feature_value(r.manual, "mean", feature),
                    r.metadata.get(col),
                )
                for r in both
                if r.metadata.get(col) is not None
            ]
            key = f"{feature}:{col}"
            if len(triples) < 4:
                out["williams_auto_manual_vs_metadata"][key] = {
                    "skipped": f"n={len(triples)} < 4"
                }
                continue
            a, m, c = (list(v) for v in zip(*triples))
            try:
                r13 = pearson(a, c).statistic
                r23 = pearson(m, c).statistic
                r12 = pearson(a, m).statistic
                w = williams_t(r13, r23, r12, len(triples))
                out["williams_auto_manual_vs_metadata"][key] = {
                    "r_auto_rating": r13, "r_manual_rating": r23,
                    "r_auto_manual": r12, "t": w.statistic, "df": w.df,
                    "p": w.p_value, "n": len(triples),
                }
            except StatsError as exc:
                out["williams_auto_manual_vs_metadata"][key] = {"skipped": str(exc)}

    for vowel in ("a", "i", "u"):
        counts = [r.auto.frame_counts[f"n_{vowel}"] for r in ok]
        durations = [r.auto.duration_s for r in ok]
        entry = {}
        try:
            entry["mean"], entry["std"] = group_summary(counts)
        except StatsError as exc:
            entry["skipped"] = str(exc)
        entry["vs_duration"] = _safe_pearson(counts, durations) if len(counts) >= 3 \
            else {"skipped": "n < 3"}
        out["frame_counts"][vowel] = entry
    return out


# --- reports --------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _result_csv_rows(row, result):
    for tag in ESTIMATOR_TAGS:
        feats, reps = result.by_estimator[tag]
        core = [
            row.speaker_id, row.group, result.method, tag, "ok",
            feats.vai, feats.vsa, feats.fcr, feats.f2i_f2u,
            reps.f1a, reps.f2a, reps.f1i, reps.f2i, reps.f1u, reps.f2u,
            result.frame_counts.get("n_a"), result.frame_counts.get("n_i"),
            result.frame_counts.get("n_u"), result.error_ratio,
            result.duration_s,
        ]
        yield core


def emit_reports(cohort, out_dir):
    """Write features.csv, group_stats.json, correlations.json, and SVG plots."""
    ok_rows = [r for r in cohort.rows if r.auto]
    if not ok_rows:
        raise PipelineError("empty cohort: no successful recordings, nothing to report")
    os.makedirs(out_dir, exist_ok=True)

    meta_cols = list(cohort.meta_cols)
    header = list(FEATURES_CSV_COLUMNS) + meta_cols
    with open(os.path.join(out_dir, "features.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in cohort.rows:
            meta_vals = [row.metadata.get(c) for c in meta_cols]
            if row.error:
                cells = [row.speaker_id, row.group, "auto", "", "error: " + row.error]
                cells += [""] * (len(FEATURES_CSV_COLUMNS) - 5)
                fh.write(",".join(_fmt(c).replace(",", ";") for c in cells)
                         + "," + ",".join(_fmt(v) for v in meta_vals) + "\n")
                continue
            for result in (row.auto, row.manual):
                if result is None:
                    continue
                for core in _result_csv_rows(row, result):
                    fh.write(",".join(_fmt(c) for c in core)
                             + ("," if meta_cols else "")
                             + ",".join(_fmt(v) for v in meta_vals) + "\n")

    def dump_json(name, payload):
        with open(os.path.join(out_dir, name), "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    dump_json("group_stats.json", cohort.group_stats)
    dump_json("correlations.json", cohort.correlations)

    # vowel-space plots: one per speaker plus the cohort means
    cohort_pts = []
    cohort_tri = {v: [] for v in ("a", "i", "u")}
    for row in ok_rows:
        _, reps = row.auto.by_estimator["p70"]
        tri = {"a": (reps.f1a, reps.f2a), "i": (reps.f1i, reps.f2i),
               "u": (reps.f1u, reps.f2u)}
        pts = [(v, f1, f2) for v, (f1, f2) in tri.items()]
        svg = plots.vowel_space_svg(pts, tri, f"Vowel space {row.speaker_id} (70/30)")
        with open(os.path.join(out_dir, f"vowel_space_{row.speaker_id}.svg"),
                  "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        for v, (f1, f2) in tri.items():
            cohort_pts.append((v, f1, f2))
            cohort_tri[v].append((f1, f2))
    mean_tri = {
        v: (float(np.mean([p[0] for p in pts])), float(np.mean([p[1] for p in pts])))
        for v, pts in cohort_tri.items() if pts
    }
    with open(os.path.join(out_dir, "vowel_space_cohort.svg"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(plots.vowel_space_svg(cohort_pts, mean_tri, "Cohort vowel space (70/30)"))

    # feature-vs-rating scatter with regression line (mean estimator)
    for feature in FEATURE_NAMES:
        for col in cohort.meta_cols:
            xs, ys = _paired(
                ok_rows,
                lambda r, c=col: r.metadata.get(c),
                lambda r, f=feature: _feature_value(r.auto, "mean", f),
            )
            if len(xs) < 2:
                continue
            svg = plots.scatter_with_fit_svg(
                xs, ys, f"{feature} vs {col}", col, feature
            )
            with open(os.path.join(out_dir, f"scatter_{feature}_{col}.svg"),
                      "w", encoding="utf-8", newline="\n") as fh:
                fh.write(svg)
