"""Command-line interface.

Subcommands: analyze, manual, cohort, synth, report. Exit codes: 0 full
success, 2 partial failures in a cohort, 1 fatal error.
"""

import argparse
import json
import sys

import numpy as np

from .errors import VowelArtError
from .pipeline import (
    PipelineConfig,
    emit_reports,
    run_cohort,
    run_manual,
    run_recording,
)
from .synth import synth_cohort


def _load_config(args):
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {}
    for key in ("k", "alpha", "corner_only", "exclude_error_frames",
                "trim_threshold_db"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if overrides:
        base = {
            "k": cfg.selection.k, "alpha": cfg.selection.alpha,
            "corner_only": cfg.selection.corner_only,
            "exclude_error_frames": cfg.exclude_error_frames,
            "trim_threshold_db": cfg.trim_threshold_db,
        }
        base.update(overrides)
        from .posterior import SelectionConfig

        cfg = PipelineConfig(
            target_rate_hz=cfg.target_rate_hz, window_s=cfg.window_s,
            hop_s=cfg.hop_s, trim_threshold_db=base["trim_threshold_db"],
            selection=SelectionConfig(base["k"], base["alpha"], base["corner_only"]),
            phone_sets=cfg.phone_sets, formant=cfg.formant, boundary=cfg.boundary,
            exclude_error_frames=base["exclude_error_frames"],
        )
    return cfg


def _result_payload(result):
    payload = {
        "speaker_id": result.speaker_id,
        "method": result.method,
        "frame_counts": result.frame_counts,
        "error_ratio": result.error_ratio,
        "duration_s": result.duration_s,
        "warnings": list(result.warnings),
        "features": {},
    }
    for tag, (feats, reps) in result.by_estimator.items():
        payload["features"][tag] = {
            "vai": feats.vai, "vsa": feats.vsa, "fcr": feats.fcr,
            "f2i_f2u": feats.f2i_f2u,
            "representatives": {
                "f1a": reps.f1a, "f2a": reps.f2a, "f1i": reps.f1i,
                "f2i": reps.f2i, "f1u": reps.f1u, "f2u": reps.f2u,
            },
        }
    return payload


def _add_common(p):
    p.add_argument("--config", help="YAML/JSON config file")
    p.add_argument("--k", type=int, help="top-k for posterior selection")
    p.add_argument("--alpha", type=float, help="posterior threshold")
    p.add_argument("--corner-only", dest="corner_only", action="store_true",
                   default=None, help="use only AA/IY/UW for selection")
    p.add_argument("--exclude-error-frames", dest="exclude_error_frames",
                   action="store_true", default=None,
                   help="drop boundary-flagged frames before aggregation")
    p.add_argument("--trim-threshold-db", dest="trim_threshold_db", type=float,
                   help="silence trim threshold (dB below peak RMS)")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="vowelart",
        description="Automatic vowel articulation features from speech recordings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the automatic path on one recording")
    p.add_argument("wav")
    p.add_argument("posteriorgram")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    _add_common(p)

    p = sub.add_parser("manual", help="run the manual-annotation path")
    p.add_argument("wav")
    p.add_argument("annotation")
    p.add_argument("--out")
    _add_common(p)

    p = sub.add_parser("cohort", help="analyze a manifest of recordings")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    _add_common(p)

    p = sub.add_parser("synth", help="generate a synthetic oracle cohort")
    p.add_argument("out_dir")
    p.add_argument("--speakers", type=int, default=30)
    p.add_argument("--lam-min", type=float, default=0.0)
    p.add_argument("--lam-max", type=float, default=0.6)
    p.add_argument("--seed", type=int, default=20240101)

    p = sub.add_parser("report", help="re-emit reports for a processed cohort")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    _add_common(p)

    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            result = run_recording(args.wav, args.posteriorgram, _load_config(args))
            text = json.dumps(_result_payload(result), indent=2, sort_keys=True)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
        if args.command == "manual":
            result = run_manual(args.wav, args.annotation, _load_config(args))
            text = json.dumps(_result_payload(result), indent=2, sort_keys=True)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
        if args.command in ("cohort", "report"):
            cohort = run_cohort(args.manifest, _load_config(args))
            emit_reports(cohort, args.out_dir)
            for row in cohort.rows:
                if row.error:
                    print(f"FAILED {row.speaker_id}: {row.error}", file=sys.stderr)
            print(f"wrote reports for {len(cohort.rows) - cohort.n_failed}/"
                  f"{len(cohort.rows)} recordings to {args.out_dir}")
            return 2 if cohort.n_failed else 0
        if args.command == "synth":
            lambdas = np.linspace(args.lam_min, args.lam_max, args.speakers)
            records, manifest = synth_cohort(lambdas, args.seed, args.out_dir)
            print(f"wrote {len(records)} speakers; manifest: {manifest}")
            return 0
        raise AssertionError(args.command)
    except VowelArtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
