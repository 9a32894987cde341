"""Log-Gabor filter bank and the three spectrogram feature methods.

Filters live in the 2D frequency domain: a Gaussian on the log-radial axis
(zero response at DC) times a Gaussian in wrapped angular distance from the
filter orientation. Filtering multiplies the spectrogram's FFT by the mask
and takes the modulus of the complex inverse transform, which is the
magnitude of the real+imaginary spatial filter pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadGrid,
    EmptyInput,
    FilterIndexOutOfRange,
    GridTooSmall,
    ShapeMismatch,
)
from .spectrogram import FixedSpectrogram

MIN_GRID = 8
BAND_ROWS = 128  # the fixed-grid height the three-band split is defined on

DEFAULT_F0 = (1.0 / 3.0, 1.0 / 6.0)
DEFAULT_SIGMA_RATIO = 0.65
DEFAULT_SIGMA_THETA = 0.6545


@dataclass(frozen=True)
class LogGaborParams:
    """Bank geometry: central frequencies are in cycles/pixel, angles in rad."""

    n_scales: int = 2
    n_orientations: int = 6
    f0_per_scale: tuple[float, ...] = DEFAULT_F0
    sigma_ratio: float = DEFAULT_SIGMA_RATIO
    sigma_theta: float = DEFAULT_SIGMA_THETA

    def __post_init__(self):
        if self.n_scales < 1 or self.n_orientations < 1:
            raise ValueError("need at least one scale and one orientation")
        f0 = tuple(float(f) for f in self.f0_per_scale)
        if len(f0) != self.n_scales:
            raise ValueError("f0_per_scale must list one frequency per scale")
        if any(not (0.0 < f <= 0.5) for f in f0):
            raise ValueError("central frequencies must lie in (0, 0.5] cycles/pixel")
        if not (0.0 < self.sigma_ratio < 1.0):
            raise ValueError("sigma_ratio must lie in (0, 1)")
        if not (self.sigma_theta > 0.0):
            raise ValueError("sigma_theta must be positive")
        object.__setattr__(self, "f0_per_scale", f0)

    def orientation_angle(self, orientation: int) -> float:
        """Angle of 1-based orientation n: (n-1)*pi/n_orientations."""
        return (orientation - 1) * np.pi / self.n_orientations


@dataclass(frozen=True)
class LogGaborBank:
    """Frequency-domain masks, indexed [scale-1, orientation-1] (1-based API)."""

    masks: np.ndarray  # (n_scales, n_orientations, rows, cols), FFT layout
    params: LogGaborParams

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.masks.shape[2], self.masks.shape[3]

    @property
    def n_filters(self) -> int:
        return self.masks.shape[0] * self.masks.shape[1]

    def mask(self, scale: int, orientation: int) -> np.ndarray:
        n_s, n_o = self.masks.shape[:2]
        if not (1 <= scale <= n_s and 1 <= orientation <= n_o):
            raise FilterIndexOutOfRange(
                f"(scale={scale}, orientation={orientation}) outside "
                f"{n_s} scales x {n_o} orientations"
            )
        return self.masks[scale - 1, orientation - 1]


def log_gabor_value(r, theta, f0, theta0, sigma_ratio, sigma_theta):
    """Transfer function at polar frequency (r, theta); defined as 0 at r = 0.

    radial term exp(-ln(r/f0)^2 / (2 ln(sigma_ratio)^2)) times angular term
    exp(-d^2 / (2 sigma_theta^2)) with d the wrapped distance to theta0.
    """
    r = np.asarray(r, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(np.where(r > 0, r, 1.0) / f0)
    radial = np.exp(-(log_ratio ** 2) / (2.0 * np.log(sigma_ratio) ** 2))
    radial = np.where(r > 0, radial, 0.0)
    dtheta = np.abs(np.arctan2(np.sin(theta - theta0), np.cos(theta - theta0)))
    angular = np.exp(-(dtheta ** 2) / (2.0 * sigma_theta ** 2))
    return radial * angular


def build_bank(grid_shape: tuple[int, int], params: LogGaborParams | None = None) -> LogGaborBank:
    """Evaluate all masks on an FFT-layout frequency grid.

    Each mask is rescaled by its grid maximum so its peak is exactly 1;
    the DC sample is exactly 0.
    """
    if params is None:
        params = LogGaborParams()
    rows, cols = grid_shape
    if rows < MIN_GRID or cols < MIN_GRID:
        raise GridTooSmall(f"grid {rows}x{cols} is below the {MIN_GRID}x{MIN_GRID} minimum")

    fy = np.fft.fftfreq(rows)[:, None]  # cycles/pixel along rows
    fx = np.fft.fftfreq(cols)[None, :]
    radius = np.hypot(fy, fx)
    angle = np.arctan2(fy, fx)

    masks = np.empty((params.n_scales, params.n_orientations, rows, cols))
    for m, f0 in enumerate(params.f0_per_scale):
        for n in range(params.n_orientations):
            theta0 = params.orientation_angle(n + 1)
            mask = log_gabor_value(
                radius, angle, f0, theta0, params.sigma_ratio, params.sigma_theta
            )
            masks[m, n] = mask / mask.max()
    masks.setflags(write=False)
    return LogGaborBank(masks=masks, params=params)


def _values_of(spec) -> np.ndarray:
    return spec.values if isinstance(spec, FixedSpectrogram) else np.asarray(spec, dtype=np.float64)


def apply_filter(spec, mask: np.ndarray) -> np.ndarray:
    """Magnitude response of one frequency mask (circular convolution)."""
    values = _values_of(spec)
    if values.shape != mask.shape:
        raise ShapeMismatch(f"spectrogram {values.shape} vs mask {mask.shape}")
    response = np.fft.ifft2(np.fft.fft2(values) * mask)
    return np.abs(response)


def apply_bank(spec, bank: LogGaborBank) -> np.ndarray:
    """Magnitudes for every (scale, orientation), sharing one forward FFT."""
    values = _values_of(spec)
    if values.shape != bank.grid_shape:
        raise ShapeMismatch(f"spectrogram {values.shape} vs bank grid {bank.grid_shape}")
    spectrum = np.fft.fft2(values)
    flat_masks = bank.masks.reshape(bank.n_filters, *bank.grid_shape)
    return np.abs(np.fft.ifft2(spectrum[None, :, :] * flat_masks, axes=(1, 2)))


def average_bank(responses) -> np.ndarray:
    """Elementwise arithmetic mean of the stacked magnitude responses."""
    stack = np.asarray(responses, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise EmptyInput("need a non-empty stack of equally shaped responses")
    return stack.mean(axis=0)


def single_filter_feature(spec, bank: LogGaborBank, scale: int, orientation: int) -> np.ndarray:
    """Method 'single': one filter's magnitude, flattened row-major."""
    return apply_filter(spec, bank.mask(scale, orientation)).ravel()


def bank_average_feature(spec, bank: LogGaborBank) -> np.ndarray:
    """Method 'bank': all filters applied, averaged, flattened row-major."""
    return average_bank(apply_bank(spec, bank)).ravel()


def band_row_ranges(rows: int = BAND_ROWS) -> tuple[tuple[int, int], ...]:
    """Half-open row intervals of the low/mid/high frequency bands."""
    e1 = -(-rows // 3)       # ceil(rows/3)
    e2 = -(-2 * rows // 3)   # ceil(2*rows/3)
    return ((0, e1), (e1, e2), (e2, rows))


@lru_cache(maxsize=32)
def _band_bank(rows: int, cols: int, params: LogGaborParams) -> LogGaborBank:
    # masks are immutable, so sharing one bank across clips is safe
    return build_bank((rows, cols), params)


def band_patch_feature(spec, bank: LogGaborBank) -> np.ndarray:
    """Method 'patches': three frequency bands, each bank-averaged.

    The fixed spectrogram is split into three near-equal row bands; each
    band gets its own bank (same parameters, band-sized grid), is averaged,
    and the flattened bands are concatenated low||mid||high.
    """
    values = _values_of(spec)
    rows, cols = values.shape
    if rows != BAND_ROWS:
        raise BadGrid(f"band split is defined for {BAND_ROWS} rows, got {rows}")
    parts = []
    for lo, hi in band_row_ranges(rows):
        band_bank = _band_bank(hi - lo, cols, bank.params)
        parts.append(average_bank(apply_bank(values[lo:hi], band_bank)).ravel())
    return np.concatenate(parts)
