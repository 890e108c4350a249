"""Round-trip the posteriorgram interchange format and watch frame selection.

The analysis pipeline never talks to a recognizer directly: it reads a CSV
of per-frame phone logits plus a decoded label. This demo builds a tiny
posteriorgram by hand, writes and re-reads it, and shows which frames the
two selection criteria pick for each corner vowel.
"""

import sys
from pathlib import Path

import numpy as np

from vowelart.posterior import (
    CANONICAL_LABELS,
    Posteriorgram,
    SelectionConfig,
    read_posteriorgram,
    select_corner_frames,
    softmax_rows,
    write_posteriorgram,
)

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out/04_interchange")
OUT.mkdir(parents=True, exist_ok=True)

idx = {lab: i for i, lab in enumerate(CANONICAL_LABELS)}
logits = np.zeros((5, 40))
decoded = []

# frame 0: confidently decoded /AA/  -> criterion 1
logits[0, idx["AA"]] = 8.0
decoded.append("AA")
# frame 1: decoded as the neighbor AH (still in the /a/ set) -> criterion 1
logits[1, idx["AH"]] = 8.0
decoded.append("AH")
# frame 2: decoded N, but UW posterior is high in the top-k -> criterion 2
logits[2, idx["N"]] = 5.1
logits[2, idx["UW"]] = 5.0
decoded.append("N")
# frame 3: IY present but weak (below alpha) -> not selected
logits[3, idx["N"]] = 2.0
logits[3, idx["D"]] = 1.8
logits[3, idx["IY"]] = 1.0
decoded.append("N")
# frame 4: silence-ish consonant -> not selected
logits[4, idx["P"]] = 6.0
decoded.append("P")

starts = 0.030 * np.arange(5)
pg = Posteriorgram(starts, starts + 0.045, logits, tuple(decoded))

path = OUT / "tiny_posteriorgram.csv"
write_posteriorgram(pg, path)
pg = read_posteriorgram(path)
print(f"wrote and re-read {path} ({pg.count} frames, {len(pg.labels)} labels)")

post = softmax_rows(pg.logits)
print("\nframe  decoded  p(AA)   p(UW)   p(IY)")
for t in range(pg.count):
    print(f"  {t}     {pg.decoded[t]:<6}  {post[t, idx['AA']]:.3f}   "
          f"{post[t, idx['UW']]:.3f}   {post[t, idx['IY']]:.3f}")

sets = select_corner_frames(pg, cfg=SelectionConfig(k=4, alpha=0.2))
print(f"\nselected: /a/ -> {sorted(sets.s_a)}, /i/ -> {sorted(sets.s_i)}, "
      f"/u/ -> {sorted(sets.s_u)}")
print("Frames 0-1 enter /a/ by decoded label; frame 2 enters /u/ because "
      "p(UW) > 0.2 inside the top-4; frame 3 stays out (p(IY) below alpha).")
