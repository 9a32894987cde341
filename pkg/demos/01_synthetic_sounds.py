"""Generate the four synthetic sound classes and look at their basic shape.

The corpus stands in for field recordings: a broadband noise burst, a
harmonic tone (fundamental + 2 overtones), a rising chirp, and a sparse
impulse train. Every clip is a pure function of (kind, duration, rate,
seed), so corpora are reproducible byte for byte.
"""

import numpy as np

from sonoclass import synthesize_clip
from sonoclass.audio_io import SYNTH_KINDS

RATE = 16000

for kind in SYNTH_KINDS:
    clip = synthesize_clip(kind, duration_s=1.0, sample_rate=RATE, seed=7)
    samples = clip.samples
    nonzero = np.flatnonzero(np.abs(samples) > 1e-6)
    # crude spectral centroid just to show the classes occupy different bands
    spectrum = np.abs(np.fft.rfft(samples))
    freqs = np.fft.rfftfreq(samples.size, 1.0 / RATE)
    centroid = float(np.sum(freqs * spectrum) / np.sum(spectrum))
    print(f"{kind:15s} peak={np.max(np.abs(samples)):.3f} "
          f"active={nonzero.size / samples.size:6.1%} "
          f"spectral centroid={centroid:7.1f} Hz")

# determinism: same arguments, same samples
a = synthesize_clip("chirp", 0.5, RATE, 123)
b = synthesize_clip("chirp", 0.5, RATE, 123)
print("\nsame seed twice is bitwise identical:", np.array_equal(a.samples, b.samples))
