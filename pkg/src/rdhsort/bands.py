"""Local differences, cell frequency and the seven cell frequency bands.

Cell frequency is kept exact. Every local difference is a multiple of 1/6
and the cell frequency is their mean over five cells, so ``30 * f_c`` is an
integer; the vectorised helpers work on that scaled value. Thresholds are
given in tenths, so ``f_c <= T`` becomes ``30 * f_c <= 3 * (10 * T)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .image import MARGIN, GrayImage

F_SCALE = 30


class Band(enum.IntEnum):
    ULCF = 0
    VLCF = 1
    LCF = 2
    MCF = 3
    HCF = 4
    VHCF = 5
    UHCF = 6


EMBEDDABLE_BANDS = tuple(b for b in Band if b is not Band.UHCF)


def _tenths(value: float, name: str) -> int:
    scaled = round(value * 10)
    if abs(scaled - value * 10) > 1e-6:
        raise ValueError(f"{name}={value} must be a multiple of 0.1")
    return scaled


@dataclass(frozen=True)
class BandThresholds:
    """Upper bounds of the ULCF..VHCF bands plus the per-pass bias.

    Values are reals with one decimal place.
    """

    t_ulcf: float = 3.3
    t_vlcf: float = 4.5
    t_lcf: float = 6.0
    t_mcf: float = 9.0
    t_hcf: float = 13.0
    t_vhcf: float = 18.0
    bias_per_pass: float = 0.3
    tenths: tuple[int, ...] = field(init=False, repr=False, compare=False)
    bias_tenths: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = (self.t_ulcf, self.t_vlcf, self.t_lcf, self.t_mcf, self.t_hcf, self.t_vhcf)
        tenths = tuple(_tenths(v, "threshold") for v in vals)
        if tenths[0] < 0 or any(a >= b for a, b in zip(tenths, tenths[1:])):
            raise ValueError(f"band thresholds must be non-negative and strictly increasing: {vals}")
        bias = _tenths(self.bias_per_pass, "bias_per_pass")
        if bias < 0:
            raise ValueError("bias_per_pass must be >= 0")
        object.__setattr__(self, "tenths", tenths)
        object.__setattr__(self, "bias_tenths", bias)

    @classmethod
    def from_tenths(cls, tenths, bias_tenths: int) -> "BandThresholds":
        return cls(*(t / 10 for t in tenths), bias_per_pass=bias_tenths / 10)

    def at_pass(self, pass_index: int) -> "BandThresholds":
        """Thresholds used for pass ``pass_index``, shifted by the cumulative bias."""
        shift = pass_index * self.bias_tenths
        return BandThresholds.from_tenths([t + shift for t in self.tenths], self.bias_tenths)

    def scaled(self) -> np.ndarray:
        """Thresholds in units of ``f_c / 30``."""
        return 3 * np.asarray(self.tenths, dtype=np.int64)


@dataclass(frozen=True)
class CellFrequency:
    f_c: Fraction
    tie_key: int


def ld_center(n4) -> Fraction:
    s1, s2, s3, s4 = sorted(int(v) for v in n4)
    return Fraction(s4 - s1, 2) + Fraction(s3 - s2, 6)


def ld_side(n3) -> Fraction:
    i1, _, i3 = sorted(int(v) for v in n3)
    return Fraction(2 * (i3 - i1), 3)


def cell_offsets() -> dict[str, list[tuple[int, int]]]:
    """Relative (row, col) positions of the centre cell and the four side cells."""
    return {
        "center": [(-1, 0), (1, 0), (0, -1), (0, 1)],
        "right": [(1, 2), (0, 1), (-1, 2)],
        "left": [(0, -1), (1, -2), (-1, -2)],
        "up": [(-2, -1), (-1, 0), (-2, 1)],
        "low": [(2, -1), (1, 0), (2, 1)],
    }


def cell_frequency(img: GrayImage, site: tuple[int, int]) -> CellFrequency:
    i, j = site
    if not (MARGIN <= i < img.height - MARGIN and MARGIN <= j < img.width - MARGIN):
        raise ValueError(f"site {site} lies outside the interior of a {img.width}x{img.height} image")
    px = img.pixels
    cells = cell_offsets()
    total = ld_center([px[i + di, j + dj] for di, dj in cells["center"]])
    for name in ("right", "left", "up", "low"):
        total += ld_side([px[i + di, j + dj] for di, dj in cells[name]])
    return CellFrequency(total / 5, i * img.width + j)


def cell_frequency_scaled(arr: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """``30 * f_c`` for every site, as int64."""
    cells = cell_offsets()

    def gather(name):
        return np.sort(np.stack([arr[rows + di, cols + dj] for di, dj in cells[name]]).astype(np.int64), axis=0)

    c = gather("center")
    total = 3 * (c[3] - c[0]) + (c[2] - c[1])
    for name in ("right", "left", "up", "low"):
        s = gather(name)
        total += 4 * (s[2] - s[0])
    return total


def _as_fraction(f_c) -> Fraction:
    if isinstance(f_c, float):
        return Fraction(f_c).limit_denominator(10 ** 6)
    return Fraction(f_c)


def classify_band(f_c, t: BandThresholds) -> Band:
    f = _as_fraction(f_c)
    for band, tenth in zip(Band, t.tenths):
        if f <= Fraction(tenth, 10):
            return band
    return Band.UHCF


def classify_bands(f_scaled: np.ndarray, t: BandThresholds) -> np.ndarray:
    # count of thresholds strictly below f_c == band index (upper bounds inclusive)
    return np.searchsorted(t.scaled(), f_scaled, side="left").astype(np.int64)


@dataclass
class SiteOrder:
    """Sites grouped by band, each group sorted by (f_c, raster index)."""

    groups: dict[Band, np.ndarray]

    def embeddable(self) -> np.ndarray:
        parts = [self.groups[b] for b in EMBEDDABLE_BANDS]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    @property
    def uhcf(self) -> np.ndarray:
        return self.groups[Band.UHCF]


def order_sites(raster: np.ndarray, f_scaled: np.ndarray, bands: np.ndarray) -> SiteOrder:
    raster = np.asarray(raster)
    order = np.lexsort((raster, f_scaled, bands))
    sorted_bands = np.asarray(bands)[order]
    groups = {b: raster[order[sorted_bands == b]] for b in Band}
    return SiteOrder(groups)
