"""Synthesize corner vowels with known formants and check them by ear(o-gram).

Source-filter synthesis drives an impulse train through resonators at the
target formants, so the ground truth is exact. This demo writes the three
corner vowels as WAV files and prints where their spectral energy actually
landed.
"""

import sys
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from vowelart import VowelSpec, synth_vowel

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out/01_vowels")
OUT.mkdir(parents=True, exist_ok=True)

CORNERS = {"a": (800.0, 1300.0), "i": (300.0, 2300.0), "u": (350.0, 800.0)}

print("corner  target F1/F2     spectral peak near F1   near F2")
for vowel, (f1, f2) in CORNERS.items():
    wav = synth_vowel(VowelSpec(f1, f2))
    wavfile.write(OUT / f"vowel_{vowel}.wav", wav.sample_rate,
                  (wav.samples * 32767).astype(np.int16))

    spec = np.abs(np.fft.rfft(wav.samples * np.hanning(wav.samples.size), n=1 << 16))
    freqs = np.fft.rfftfreq(1 << 16, 1.0 / wav.sample_rate)

    def peak(lo, hi):
        band = np.where((freqs >= lo) & (freqs <= hi))[0]
        return freqs[band[np.argmax(spec[band])]]

    p1 = peak(f1 - 150, f1 + 150)
    p2 = peak(f2 - 200, f2 + 200)
    print(f"/{vowel}/     {f1:6.0f}/{f2:6.0f} Hz    {p1:8.1f} Hz        {p2:8.1f} Hz")

print(f"\nwrote WAVs to {OUT}/")
print("The peaks sit on the harmonic nearest each formant (f0 = 120 Hz), "
      "so they can differ from the target by up to half a harmonic spacing.")
