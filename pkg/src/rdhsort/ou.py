"""Overflow/underflow guard.

Sites whose prediction sits near a bound and whose error points toward it
are marked yellow and skipped. Anything that still lands on -1 or 256
after a pass is clamped and recorded so the receiver can undo the clamp.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ExtractionError
from .image import GrayImage


class OuClass(enum.Enum):
    GREEN = "green"
    YELLOW = "yellow"


class ClampDirection(enum.IntEnum):
    FROM_256 = 0
    FROM_MINUS_1 = 1


@dataclass(frozen=True)
class TauConfig:
    tau1: int = 0
    tau2: int = 0

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= 255:
                raise ValueError(f"{name} must be a whole number in [0, 255], got {v!r}")


@dataclass(frozen=True, order=True)
class OuEntry:
    pass_index: int
    raster_index: int
    direction: ClampDirection


def classify_pixel(h: int, hp: int, tau: TauConfig) -> OuClass:
    if 255 - hp < tau.tau2 and h >= hp:
        return OuClass.YELLOW
    if hp < tau.tau1 and h < hp:
        return OuClass.YELLOW
    return OuClass.GREEN


def yellow_mask(h: np.ndarray, hp: np.ndarray, tau: TauConfig) -> np.ndarray:
    return ((255 - hp < tau.tau2) & (h >= hp)) | ((hp < tau.tau1) & (h < hp))


def fix_red(pass_result, pass_index: int) -> tuple[GrayImage, list[OuEntry]]:
    """Clamp 256 -> 255 and -1 -> 0, recording one entry per clamped pixel."""
    arr = np.array(pass_result, dtype=np.int64)
    if arr.size and (arr.min() < -1 or arr.max() > 256):
        raise ValueError("pass result holds values outside [-1, 256]")
    flat = arr.ravel()
    high = np.flatnonzero(flat == 256)
    low = np.flatnonzero(flat == -1)
    entries = [OuEntry(pass_index, int(i), ClampDirection.FROM_256) for i in high]
    entries += [OuEntry(pass_index, int(i), ClampDirection.FROM_MINUS_1) for i in low]
    entries.sort(key=lambda e: e.raster_index)
    flat[high] = 255
    flat[low] = 0
    return GrayImage(arr), entries


def restore_red(img, entries) -> np.ndarray:
    """Undo :func:`fix_red`; returns an int64 array that may hold -1 or 256."""
    arr = img.to_array(np.int64) if isinstance(img, GrayImage) else np.array(img, dtype=np.int64)
    flat = arr.ravel()
    for e in entries:
        want = 255 if e.direction is ClampDirection.FROM_256 else 0
        if not 0 <= e.raster_index < flat.size or flat[e.raster_index] != want:
            raise ExtractionError(f"OU entry {e} does not match the image")
        flat[e.raster_index] = 256 if want == 255 else -1
    return arr
