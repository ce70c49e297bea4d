"""Sorting by pixel existence probability (SPEP).

The smoothest ULCF sites (``L_ULCF``) define, for each predicted intensity,
the fraction of the pass's sites with that prediction that fall inside
``L_ULCF``. ULCF and VLCF are then split into sub-bands by thresholding that
fraction. Probabilities are compared exactly as integer cross products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bands import Band
from .image import ColorParity, GrayImage, site_grid
from .predictor import predict_sites

FT_SCALE = 10_000
SUBBANDED = (Band.ULCF, Band.VLCF)


@dataclass(frozen=True)
class ExistenceProfile:
    """Per-intensity counts ``N`` (all sites) and ``M`` (sites in L_ULCF)."""

    n: np.ndarray
    m: np.ndarray
    l_ulcf_size: int

    def probability(self, intensity: int) -> Fraction:
        n = int(self.n[intensity])
        return Fraction(int(self.m[intensity]), n) if n else Fraction(0)

    @property
    def f(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.n > 0, self.m / np.maximum(self.n, 1), 0.0)

    def rows(self):
        """``(intensity, N, M, f)`` for all 256 intensities."""
        f = self.f
        return [(h, int(self.n[h]), int(self.m[h]), float(f[h])) for h in range(256)]


def select_l_ulcf(raster: np.ndarray, f_scaled: np.ndarray, size: int) -> np.ndarray:
    """The ``size`` sites with the smallest cell frequency (raster index breaks ties)."""
    order = np.lexsort((raster, f_scaled))
    return np.asarray(raster)[order[:size]]


def profile_from_predictions(all_pred: np.ndarray, l_ulcf_pred: np.ndarray, l_ulcf_size: int) -> ExistenceProfile:
    n = np.bincount(all_pred, minlength=256)[:256]
    m = np.bincount(l_ulcf_pred, minlength=256)[:256]
    return ExistenceProfile(n.astype(np.int64), m.astype(np.int64), l_ulcf_size)


def existence_profile(img: GrayImage, color: ColorParity, l_ulcf) -> ExistenceProfile:
    """Profile over the interior sites of ``color``; ``l_ulcf`` is a collection of raster indices."""
    arr = img.to_array(np.int64)
    rows, cols = site_grid(img.height, img.width, color)
    pred = predict_sites(arr, rows, cols)
    raster = rows * img.width + cols
    chosen = np.isin(raster, np.fromiter(l_ulcf, dtype=np.int64))
    return profile_from_predictions(pred, pred[chosen], int(chosen.sum()))


def threshold_units(f_thresholds) -> tuple[int, ...]:
    """Convert probability thresholds to integer units of 1e-4, checking they descend."""
    units = []
    for t in f_thresholds:
        u = round(t * FT_SCALE)
        if abs(u - t * FT_SCALE) > 1e-6 or not 0 <= u <= 0xFFFF:
            raise ValueError(f"f_threshold {t} must be a multiple of 1e-4 in [0, 6.5535]")
        units.append(u)
    if any(a <= b for a, b in zip(units, units[1:])):
        raise ValueError(f"f_threshold list must be strictly descending: {tuple(f_thresholds)}")
    return tuple(units)


def assign_subband(predicted: int, band: Band, profile: ExistenceProfile, f_threshold) -> int:
    """1-based sub-band index of a site whose prediction is ``predicted``.

    ``f_threshold`` is one probability (two sub-bands) or a strictly
    descending sequence of them (``len + 1`` sub-bands).
    """
    thresholds = (f_threshold,) if np.isscalar(f_threshold) else tuple(f_threshold)
    units = threshold_units(thresholds)
    if band not in SUBBANDED:
        return 1
    n = int(profile.n[predicted])
    m = int(profile.m[predicted])
    for i, u in enumerate(units):
        if m * FT_SCALE >= u * n and n > 0:
            return i + 1
    return len(units) + 1


def subband_indices(pred: np.ndarray, profile: ExistenceProfile, units: tuple[int, ...]) -> np.ndarray:
    """0-based sub-band index per site (the caller applies it to ULCF/VLCF only)."""
    n = profile.n[pred]
    m = profile.m[pred]
    sub = np.full(pred.shape, len(units), dtype=np.int64)
    for i in reversed(range(len(units))):
        hit = (n > 0) & (m * FT_SCALE >= units[i] * n)
        sub[hit] = i
    return sub
