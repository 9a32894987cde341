"""Translation-invariant wavelet comparison features.

Pipeline: undecimated Haar detail coefficients for 3 dyadic scales x
3 orientations -> per-plane energy normalization -> local-max pooling on
2^j cells (C1) -> sliding scalar products against randomly sampled patches
(S2) -> one global max per patch (C2). C2 vectors go straight to the SVM.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BadShape, EmptyInput, PatchLargerThanPlane

SCALES = (1, 2, 3)
ORIENTATIONS = ("horizontal", "vertical", "diagonal")
DEFAULT_N_PATCHES = 200
DEFAULT_PATCH_SIZES = (4, 8, 12)

# Haar analysis pair, mean/half-difference normalization.
_HAAR_LO = (0.5, 0.5)
_HAAR_HI = (0.5, -0.5)


@dataclass(frozen=True)
class TiwtCoeffs:
    """Undecimated detail planes, shape (len(SCALES), 3, N1, N2)."""

    planes: np.ndarray

    @property
    def input_shape(self) -> tuple[int, int]:
        return self.planes.shape[2], self.planes.shape[3]

    def plane(self, scale: int, orientation: int) -> np.ndarray:
        """Detail plane for 1-based scale j and orientation k."""
        return self.planes[scale - 1, orientation - 1]


@dataclass(frozen=True)
class PatchSet:
    """Patches sampled from training C1 pyramids, each (M, M, 3).

    sources records (clip_index, scale, row, col) of every extraction so a
    persisted set is reproducible and auditable.
    """

    patches: tuple[np.ndarray, ...]
    sources: tuple[tuple[int, int, int, int], ...]
    seed: int
    sizes: tuple[int, ...] = DEFAULT_PATCH_SIZES

    def __len__(self) -> int:
        return len(self.patches)


def tiwt(values: np.ndarray) -> TiwtCoeffs:
    """Stationary 2D Haar details with periodic extension.

    Level j uses taps spaced 2^(j-1) samples apart on the previous
    approximation, so every plane keeps the input resolution.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise BadShape("input must be a 2D array")
    n1, n2 = values.shape
    step = 2 ** len(SCALES)
    if n1 % step or n2 % step:
        raise BadShape(f"dimensions must be divisible by {step}, got {values.shape}")

    planes = np.empty((len(SCALES), len(ORIENTATIONS), n1, n2))
    approx = values
    for idx, scale in enumerate(SCALES):
        s = 2 ** (scale - 1)
        lo_r = _HAAR_LO[0] * approx + _HAAR_LO[1] * np.roll(approx, -s, axis=0)
        hi_r = _HAAR_HI[0] * approx + _HAAR_HI[1] * np.roll(approx, -s, axis=0)
        planes[idx, 0] = _HAAR_LO[0] * hi_r + _HAAR_LO[1] * np.roll(hi_r, -s, axis=1)
        planes[idx, 1] = _HAAR_HI[0] * lo_r + _HAAR_HI[1] * np.roll(lo_r, -s, axis=1)
        planes[idx, 2] = _HAAR_HI[0] * hi_r + _HAAR_HI[1] * np.roll(hi_r, -s, axis=1)
        approx = _HAAR_LO[0] * lo_r + _HAAR_LO[1] * np.roll(lo_r, -s, axis=1)
    planes.setflags(write=False)
    return TiwtCoeffs(planes=planes)


def haar_taps(scale: int) -> tuple[np.ndarray, np.ndarray]:
    """Effective 1D analysis filters at a dyadic scale (cascade of upsampled taps)."""
    lo = np.array([1.0])
    for j in range(1, scale):
        s = 2 ** (j - 1)
        up = np.zeros(s + 1)
        up[0], up[s] = _HAAR_LO
        lo = np.convolve(lo, up)
    s = 2 ** (scale - 1)
    up_lo = np.zeros(s + 1)
    up_lo[0], up_lo[s] = _HAAR_LO
    up_hi = np.zeros(s + 1)
    up_hi[0], up_hi[s] = _HAAR_HI
    return np.convolve(lo, up_lo), np.convolve(lo, up_hi)


def normalize_scale(coeffs: TiwtCoeffs) -> np.ndarray:
    """Divide |detail| by the plane's total squared energy, per (scale, orientation).

    Scaling the input by c > 0 scales the result by 1/c. A plane holding
    nothing but rounding dust (its largest coefficient is negligible next
    to the largest coefficient anywhere in the tensor) is treated as
    all-zero instead of being amplified by the division; the threshold is
    relative, so this guard is itself scale-invariant.
    """
    planes = coeffs.planes
    mags = np.abs(planes)
    plane_max = mags.max(axis=(2, 3), keepdims=True)
    dead = plane_max <= 1e-12 * mags.max()
    energy = np.sum(planes ** 2, axis=(2, 3), keepdims=True)
    safe = np.where(energy > 0.0, energy, 1.0)
    return np.where(dead | (energy == 0.0), 0.0, mags / safe)


def local_max(normalized: np.ndarray) -> list[np.ndarray]:
    """Max-pool each scale's planes over non-overlapping 2^j x 2^j cells.

    Returns one (3, N1/2^j, N2/2^j) array per scale.
    """
    n1, n2 = normalized.shape[2], normalized.shape[3]
    pooled = []
    for idx, scale in enumerate(SCALES):
        cell = 2 ** scale
        if n1 % cell or n2 % cell:
            raise BadShape(f"plane {n1}x{n2} not divisible by cell {cell}")
        block = normalized[idx].reshape(3, n1 // cell, cell, n2 // cell, cell)
        pooled.append(block.max(axis=(2, 4)))
    return pooled


def c1_pyramid(values: np.ndarray) -> list[np.ndarray]:
    """tiwt -> normalize_scale -> local_max for one spectrogram."""
    return local_max(normalize_scale(tiwt(values)))


def sample_patches(
    training_c1: list[list[np.ndarray]],
    n_patches: int = DEFAULT_N_PATCHES,
    sizes: tuple[int, ...] = DEFAULT_PATCH_SIZES,
    seed: int = 0,
) -> PatchSet:
    """Extract n_patches random (M, M, 3) windows from training C1 pyramids.

    Sizes are cycled through `sizes`; the source clip, scale, and position
    are drawn uniformly (scale restricted to planes large enough for the
    patch). Deterministic for a fixed seed.
    """
    if n_patches < 1 or not training_c1:
        raise EmptyInput("need at least one patch and one training pyramid")
    rng = np.random.default_rng(seed)
    patches = []
    sources = []
    for i in range(n_patches):
        m = sizes[i % len(sizes)]
        clip_idx = int(rng.integers(len(training_c1)))
        pyramid = training_c1[clip_idx]
        fitting = [
            j for j, planes in enumerate(pyramid)
            if planes.shape[1] >= m and planes.shape[2] >= m
        ]
        if not fitting:
            raise PatchLargerThanPlane(f"patch size {m} fits no C1 plane")
        scale_idx = fitting[int(rng.integers(len(fitting)))]
        planes = pyramid[scale_idx]
        u = int(rng.integers(planes.shape[1] - m + 1))
        v = int(rng.integers(planes.shape[2] - m + 1))
        patch = np.moveaxis(planes[:, u:u + m, v:v + m], 0, -1).copy()
        patch.setflags(write=False)
        patches.append(patch)
        sources.append((clip_idx, SCALES[scale_idx], u, v))
    return PatchSet(
        patches=tuple(patches), sources=tuple(sources), seed=seed, sizes=tuple(sizes)
    )


def patch_transform(c1: list[np.ndarray], patch_set: PatchSet) -> list[dict[int, np.ndarray]]:
    """Sliding scalar product of every patch against every C1 scale it fits.

    Result: per patch, a dict mapping the scale j to the 2D array of scores
    over all valid offsets (correlation summed over the 3 orientations).
    """
    out: list[dict[int, np.ndarray]] = [dict() for _ in patch_set.patches]
    by_size: dict[int, list[int]] = {}
    for i, patch in enumerate(patch_set.patches):
        by_size.setdefault(patch.shape[0], []).append(i)

    for m, indices in by_size.items():
        stack = np.stack([patch_set.patches[i] for i in indices])  # (P, M, M, 3)
        for scale_idx, scale in enumerate(SCALES):
            planes = c1[scale_idx]
            if planes.shape[1] < m or planes.shape[2] < m:
                continue
            windows = sliding_window_view(planes, (m, m), axis=(1, 2))
            scores = np.einsum("kuvmn,pmnk->puv", windows, stack, optimize=True)
            for row, i in enumerate(indices):
                out[i][scale] = scores[row]
    return out


def global_max(s2: list[dict[int, np.ndarray]]) -> np.ndarray:
    """One scalar per patch: max over every scale and offset."""
    if not s2:
        raise EmptyInput("no patch scores")
    values = np.empty(len(s2))
    for i, per_scale in enumerate(s2):
        if not per_scale:
            raise EmptyInput(f"patch {i} has no valid placements")
        values[i] = max(float(arr.max()) for arr in per_scale.values())
    return values


def c2_features(values: np.ndarray, patch_set: PatchSet) -> np.ndarray:
    """Full baseline feature vector for one fixed spectrogram."""
    return global_max(patch_transform(c1_pyramid(values), patch_set))
