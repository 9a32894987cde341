"""Hamming-windowed STFT log-magnitude spectrograms on a fixed grid.

The analysis chain is stft -> log_magnitude -> to_fixed; every feature
method downstream consumes the fixed-size, [0, 1]-normalized matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .audio_io import AudioClip
from .errors import ClipTooShort, DegenerateInput

DEFAULT_FRAME_SIZE = 256
DEFAULT_HOP = 64
DEFAULT_LOG_FLOOR = 1e-10
DEFAULT_FIXED_ROWS = 128
DEFAULT_FIXED_COLS = 128


def hamming_window(frame_size: int) -> np.ndarray:
    """Symmetric Hamming window: 0.54 - 0.46*cos(2*pi*n/(frame_size-1))."""
    return np.hamming(frame_size)


@dataclass(frozen=True)
class StftParams:
    frame_size: int = DEFAULT_FRAME_SIZE
    hop: int = DEFAULT_HOP
    log_floor: float = DEFAULT_LOG_FLOOR
    window: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not (0 < self.hop <= self.frame_size):
            raise ValueError(f"need 0 < hop <= frame_size, got hop={self.hop} frame_size={self.frame_size}")
        if not (self.log_floor > 0):
            raise ValueError("log_floor must be positive")
        window = self.window
        if window is None:
            window = hamming_window(self.frame_size)
        window = np.asarray(window, dtype=np.float64)
        if window.shape != (self.frame_size,):
            raise ValueError("window length must equal frame_size")
        if window.min() <= 0.0 or window.max() > 1.08:
            raise ValueError("window values must lie in (0, 1.08]")
        if not np.allclose(window, window[::-1]):
            raise ValueError("window must be symmetric")
        window.setflags(write=False)
        object.__setattr__(self, "window", window)

    @property
    def n_bins(self) -> int:
        return self.frame_size // 2 + 1


@dataclass(frozen=True)
class Spectrogram:
    """Log-magnitude STFT: rows are frequency bins (row 0 = DC), cols frames."""

    values: np.ndarray
    bin_hz: float
    params: StftParams


@dataclass(frozen=True)
class FixedSpectrogram:
    """Resized spectrogram, min-max normalized into [0, 1].

    source_range records the (min, max) of the resized values before
    normalization, so the mapping is invertible.
    """

    values: np.ndarray
    source_range: tuple[float, float]


def frame_count(n_samples: int, params: StftParams) -> int:
    """Frames in an n-sample clip; trailing partial frames are dropped."""
    return (n_samples - params.frame_size) // params.hop + 1


def stft(clip: AudioClip, params: StftParams | None = None) -> np.ndarray:
    """Short-time Fourier transform, one-sided spectrum.

    Returns a complex (frame_size/2 + 1) x n_frames matrix where entry
    (y, x) = sum_n f[n + x*hop] * w[n] * exp(-i*2*pi*y*n/frame_size).
    """
    if params is None:
        params = StftParams()
    samples = clip.samples
    if samples.size < params.frame_size:
        raise ClipTooShort(
            f"clip has {samples.size} samples, need at least {params.frame_size}"
        )
    n_frames = frame_count(samples.size, params)
    starts = params.hop * np.arange(n_frames)
    frames = samples[starts[:, None] + np.arange(params.frame_size)[None, :]]
    spectrum = np.fft.rfft(frames * params.window[None, :], axis=1)
    return spectrum.T.copy()


def log_magnitude(
    stft_matrix: np.ndarray,
    log_floor: float = DEFAULT_LOG_FLOOR,
    bin_hz: float = 0.0,
    params: StftParams | None = None,
) -> Spectrogram:
    """Natural-log magnitude with a floor so no entry is -inf."""
    values = np.log(np.maximum(np.abs(stft_matrix), log_floor))
    return Spectrogram(values=values, bin_hz=bin_hz, params=params or StftParams())


def log_spectrogram(clip: AudioClip, params: StftParams | None = None) -> Spectrogram:
    """Convenience: stft followed by log_magnitude, with bin spacing filled in."""
    if params is None:
        params = StftParams()
    spectrum = stft(clip, params)
    return log_magnitude(
        spectrum,
        log_floor=params.log_floor,
        bin_hz=clip.sample_rate / params.frame_size,
        params=params,
    )


def to_fixed(
    spec: Spectrogram | np.ndarray,
    rows: int = DEFAULT_FIXED_ROWS,
    cols: int = DEFAULT_FIXED_COLS,
) -> FixedSpectrogram:
    """Bilinear-resize to rows x cols and min-max normalize into [0, 1].

    A constant input has no range to normalize and maps to all 0.5.
    """
    values = spec.values if isinstance(spec, Spectrogram) else np.asarray(spec, dtype=np.float64)
    in_rows, in_cols = values.shape
    if in_rows < 2 or in_cols < 2:
        raise DegenerateInput(f"cannot resize a {in_rows}x{in_cols} spectrogram")

    if (in_rows, in_cols) == (rows, cols):
        resized = values.astype(np.float64)
    else:
        interp = RegularGridInterpolator(
            (np.arange(in_rows), np.arange(in_cols)), values, method="linear"
        )
        rr = np.linspace(0.0, in_rows - 1.0, rows)
        cc = np.linspace(0.0, in_cols - 1.0, cols)
        grid = np.stack(np.meshgrid(rr, cc, indexing="ij"), axis=-1)
        resized = interp(grid)

    lo = float(resized.min())
    hi = float(resized.max())
    # constant up to interpolation rounding: no contrast to normalize
    if hi - lo > 1e-12 * max(abs(lo), abs(hi)):
        out = (resized - lo) / (hi - lo)
    else:
        out = np.full_like(resized, 0.5)
    return FixedSpectrogram(values=out, source_range=(lo, hi))
