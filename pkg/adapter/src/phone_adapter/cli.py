"""adapter CLI: infer a posteriorgram from a WAV, or validate an existing one."""

import argparse
import sys

from .adapter import AdapterError, infer, validate
from .backends import MODEL_CACHE_ENV, BackendError, resolve_backend


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="adapter",
        description="Export phone posteriorgrams in the interchange CSV format. "
        f"Set ${MODEL_CACHE_ENV} to control the model cache directory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="run the recognizer over a WAV")
    p.add_argument("wav")
    p.add_argument("--out", required=True, help="output posteriorgram CSV")
    p.add_argument("--backend", default="allosaurus",
                   choices=("allosaurus", "energy"))
    p.add_argument("--model", default="latest", help="recognizer model id")

    p = sub.add_parser("validate", help="schema-check an interchange CSV")
    p.add_argument("csv")

    args = parser.parse_args(argv)
    try:
        if args.command == "infer":
            backend = resolve_backend(args.backend, args.model)
            out = infer(args.wav, args.out, backend)
            print(f"wrote {out.n_frames} frames to {out.csv_path} "
                  f"(provenance: {out.sidecar_path})")
            return 0
        if args.command == "validate":
            checks = validate(args.csv)
            failed = 0
            for name, passed, detail in checks:
                mark = "PASS" if passed else "FAIL"
                line = f"{mark} {name}"
                if detail:
                    line += f" ({detail})"
                print(line)
                failed += not passed
            return 1 if failed else 0
        raise AssertionError(args.command)
    except (AdapterError, BackendError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
