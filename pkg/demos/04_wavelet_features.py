"""The translation-invariant wavelet comparison features, step by step.

Undecimated Haar details (3 scales x 3 orientations) -> per-plane energy
normalization -> local-max pooling into C1 pyramids -> sliding scalar
products with randomly sampled patches -> one global max per patch (C2).
"""

import numpy as np

from sonoclass import (
    global_max,
    local_max,
    normalize_scale,
    patch_transform,
    peak_normalize,
    log_spectrogram,
    sample_patches,
    synthesize_clip,
    tiwt,
    to_fixed,
)
from sonoclass.wavelet_baseline import c1_pyramid

fixed = [
    to_fixed(log_spectrogram(peak_normalize(
        synthesize_clip(kind, 1.0, 16000, seed)
    ))).values
    for kind, seed in [("noise_burst", 1), ("impulse_train", 2), ("chirp", 3)]
]

coeffs = tiwt(fixed[0])
print("detail planes:", coeffs.planes.shape, "(scales x orientations x H x W)")

s1 = normalize_scale(coeffs)
print(f"normalized coefficients: max {s1.max():.3e} "
      "(input scaling by c rescales these by exactly 1/c)")

c1 = local_max(s1)
print("C1 pyramid shapes:", [p.shape for p in c1])

# patches come from the training clips only; evaluation reuses them
train_c1 = [c1_pyramid(v) for v in fixed]
patch_set = sample_patches(train_c1, n_patches=12, sizes=(4, 8, 12), seed=9)
print(f"\nsampled {len(patch_set)} patches, sizes cycle {patch_set.sizes}")
print("first three sources (clip, scale, row, col):", patch_set.sources[:3])

scores = patch_transform(c1, patch_set)
c2 = global_max(scores)
print(f"\nC2 feature vector: length {c2.size}, range "
      f"[{c2.min():.3e}, {c2.max():.3e}]")
print("these vectors go straight to the one-vs-one SVM (no MI step)")
