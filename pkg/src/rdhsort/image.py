"""Grayscale image value type, binary PGM I/O, checkerboard sites and PSNR."""

from __future__ import annotations

import enum
import math
from pathlib import Path

import numpy as np

from .errors import ImageFormatError

#: Rows/columns excluded on every edge; side cells reach two pixels out.
MARGIN = 2
MIN_SIDE = 8


class ColorParity(enum.IntEnum):
    """Checkerboard color. WHITE pixels have an even ``row + col``."""

    WHITE = 0
    BLACK = 1

    @property
    def other(self) -> "ColorParity":
        return ColorParity(1 - self.value)


class GrayImage:
    """Immutable 8-bit grayscale image backed by a read-only ``uint8`` array."""

    __slots__ = ("_pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ImageFormatError(f"expected a non-empty 2-D pixel grid, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.dtype.kind not in "iub":
                raise ImageFormatError(f"pixel values must be integers, got {arr.dtype}")
            if arr.min() < 0 or arr.max() > 255:
                raise ImageFormatError("pixel values must lie in [0, 255]")
        arr = arr.astype(np.uint8, copy=True)
        arr.setflags(write=False)
        self._pixels = arr

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._pixels.shape

    def to_array(self, dtype=np.int32) -> np.ndarray:
        """Return a writable copy of the pixels."""
        return self._pixels.astype(dtype, copy=True)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self._pixels, other._pixels)

    __hash__ = None

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageFormatError("truncated PGM header")
    return data[start:pos], pos


def load_pgm(data: bytes) -> GrayImage:
    """Parse a binary (P5) PGM with maxval 255."""
    if len(data) < 2:
        raise ImageFormatError("truncated PGM header")
    magic = data[:2]
    if magic != b"P5":
        raise ImageFormatError(f"unsupported format {magic!r}: only binary PGM (P5) is accepted")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ImageFormatError(f"malformed PGM header token {tok!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"invalid PGM dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval}: only 255 is accepted")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise ImageFormatError("missing whitespace before PGM pixel data")
    pos += 1
    count = width * height
    body = data[pos:pos + count]
    if len(body) < count:
        raise ImageFormatError(f"truncated pixel data: expected {count} bytes, got {len(body)}")
    return GrayImage(np.frombuffer(body, dtype=np.uint8).reshape(height, width))


def save_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_pgm(path) -> GrayImage:
    return load_pgm(Path(path).read_bytes())


def write_pgm(path, img: GrayImage) -> None:
    Path(path).write_bytes(save_pgm(img))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical images."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    sse = int(np.sum(diff * diff))
    if sse == 0:
        return math.inf
    mse = sse / diff.size
    return 10.0 * math.log10(255.0 ** 2 / mse)


def site_grid(height: int, width: int, color: ColorParity) -> tuple[np.ndarray, np.ndarray]:
    """Rows and columns of the interior sites of one color, in raster order."""
    rows, cols = np.mgrid[MARGIN:height - MARGIN, MARGIN:width - MARGIN]
    rows = rows.ravel()
    cols = cols.ravel()
    keep = (rows + cols) % 2 == int(color)
    return rows[keep], cols[keep]


def enumerate_sites(img: GrayImage, color: ColorParity) -> np.ndarray:
    """Interior coordinates of ``color`` as an ``(n, 2)`` array of (row, col)."""
    rows, cols = site_grid(img.height, img.width, color)
    return np.stack([rows, cols], axis=1)


def reserved_region(height: int, width: int) -> np.ndarray:
    """Raster indices of the margin ring, in the order header bits are stored.

    Bottom two rows first, then the top two rows, then the two left and two
    right columns of the remaining rows.
    """
    idx = np.arange(height * width).reshape(height, width)
    parts = [
        idx[height - MARGIN:, :].ravel(),
        idx[:MARGIN, :].ravel(),
        np.concatenate([idx[MARGIN:height - MARGIN, :MARGIN], idx[MARGIN:height - MARGIN, width - MARGIN:]],
                       axis=1).ravel(),
    ]
    return np.concatenate(parts)
