"""Posteriorgram interchange contract.

This module restates the on-disk contract shared with downstream analysis
tools: a CSV with header `start_s,end_s,decoded,<40 phone labels>`, raw
logits (not posteriors), frame timing start_s = i * 0.030 s and
end_s = start_s + 0.045 s. The label inventory is the 39 ARPABET English
phonemes plus IX, in alphabetical order.
"""

WINDOW_S = 0.045
HOP_S = 0.030

CANONICAL_LABELS = (
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IX", "IY", "JH",
    "K", "L", "M", "N", "NG", "OW", "OY", "P", "R", "S",
    "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH",
)

HEADER = ("start_s", "end_s", "decoded") + CANONICAL_LABELS


def frame_count(duration_s):
    """Number of fully-contained analysis frames for a recording."""
    import math

    if duration_s + 1e-12 < WINDOW_S:
        return 0
    return int(math.floor((duration_s - WINDOW_S) / HOP_S + 1e-9)) + 1


def write_rows(path, logits, decoded):
    """Write an interchange CSV. `logits` is (n, 40); `decoded` length n."""
    n = len(decoded)
    if getattr(logits, "shape", (0, 0)) != (n, 40):
        raise ValueError(f"logits must be ({n}, 40)")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(HEADER) + "\n")
        for i in range(n):
            start = i * HOP_S
            cells = [f"{start:.10g}", f"{start + WINDOW_S:.10g}", decoded[i]]
            cells += [f"{v:.10g}" for v in logits[i]]
            fh.write(",".join(cells) + "\n")
