"""Bit-exact overhead header.

Layout, most significant bit first::

    magic                16   0x5244
    version               8   1
    start_color           1
    total_bitstream_len  32
    reserved_len         16   LSBs of the reserved region overwritten
    num_segments         16
    segment * n          40   pass 8 | band 4 | k 4 | bits 24
    thresholds * 6       48   tenths
    bias                  8   tenths
    l_ulcf_size          16
    L                     4   number of sub-bands
    f_threshold * (L-1)  16   units of 1e-4
    K                     8
    poh_mode              1
    tau1, tau2           16
    ou_count             16
    ou_entry * m         41   pass 8 | raster 32 | direction 1
    crc16                16   CCITT 0x1021, init 0xFFFF, over all bits above

The header is followed by zero padding up to ``reserved_len`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HeaderError
from .hia import PohMode
from .image import ColorParity
from .ou import ClampDirection, OuEntry

MAGIC = 0x5244
VERSION = 1
SEGMENT_BITS = 40
OU_ENTRY_BITS = 41
CRC_POLY = 0x1021


@dataclass(frozen=True, order=True)
class Segment:
    pass_index: int
    band_code: int
    k: int
    bits_embedded: int


@dataclass(frozen=True)
class OverheadHeader:
    start_color: ColorParity
    total_bitstream_len: int
    reserved_len: int
    segments: tuple[Segment, ...]
    threshold_tenths: tuple[int, ...]
    bias_tenths: int
    l_ulcf_size: int
    f_threshold_units: tuple[int, ...]
    k_max: int
    poh_mode: PohMode
    tau1: int
    tau2: int
    ou_entries: tuple[OuEntry, ...] = field(default=())

    @property
    def n_subbands(self) -> int:
        return len(self.f_threshold_units) + 1


def crc16(bits) -> int:
    crc = 0xFFFF
    for b in bits:
        top = (crc >> 15) & 1
        crc = (crc << 1) & 0xFFFF
        if top ^ int(b):
            crc ^= CRC_POLY
    return crc


class BitWriter:
    def __init__(self):
        self.bits: list[int] = []

    def put(self, value: int, width: int, name: str = "field"):
        value = int(value)
        if value < 0 or value >= 1 << width:
            raise HeaderError(f"{name}={value} does not fit in {width} bits")
        self.bits.extend((value >> (width - 1 - i)) & 1 for i in range(width))


class BitReader:
    def __init__(self, bits):
        self.bits = [int(b) for b in bits]
        self.pos = 0

    def get(self, width: int) -> int:
        if self.pos + width > len(self.bits):
            raise HeaderError("header runs past the end of the reserved region")
        value = 0
        for b in self.bits[self.pos:self.pos + width]:
            value = (value << 1) | b
        self.pos += width
        return value


def header_bit_length(n_segments: int, n_subbands: int, n_ou: int) -> int:
    fixed = 16 + 8 + 1 + 32 + 16 + 16 + 48 + 8 + 16 + 4 + 8 + 1 + 8 + 8 + 16 + 16
    return fixed + SEGMENT_BITS * n_segments + 16 * (n_subbands - 1) + OU_ENTRY_BITS * n_ou


def _validate(h: OverheadHeader) -> None:
    if len(h.threshold_tenths) != 6 or any(a >= b for a, b in zip(h.threshold_tenths, h.threshold_tenths[1:])):
        raise HeaderError("inconsistent header: band thresholds must be 6 strictly increasing values")
    if not 1 <= h.n_subbands <= 6:
        raise HeaderError(f"inconsistent header: sub-band count {h.n_subbands} outside 1..6")
    if any(a <= b for a, b in zip(h.f_threshold_units, h.f_threshold_units[1:])):
        raise HeaderError("inconsistent header: f thresholds must be strictly descending")
    if not 1 <= h.k_max <= 15:
        raise HeaderError(f"inconsistent header: K={h.k_max} outside 1..15")
    if not h.segments and h.total_bitstream_len:
        raise HeaderError("inconsistent header: no segments but a non-empty bitstream")
    n_codes = 2 * h.n_subbands + 4
    prev = None
    for s in h.segments:
        key = (s.pass_index, s.band_code)
        if prev is not None and key <= prev:
            raise HeaderError("inconsistent header: segments are not strictly ordered")
        prev = key
        if s.band_code >= n_codes or not 1 <= s.k <= h.k_max or s.bits_embedded < 1:
            raise HeaderError(f"inconsistent header: bad segment {s}")
    if sum(s.bits_embedded for s in h.segments) != h.total_bitstream_len:
        raise HeaderError("inconsistent header: segment bits do not sum to the bitstream length")
    if h.reserved_len > h.total_bitstream_len:
        raise HeaderError("inconsistent header: reserved prefix longer than the bitstream")


def encode_header(h: OverheadHeader) -> np.ndarray:
    """Header bits (without padding) as a ``uint8`` array of 0/1."""
    _validate(h)
    w = BitWriter()
    w.put(MAGIC, 16)
    w.put(VERSION, 8)
    w.put(int(h.start_color), 1)
    w.put(h.total_bitstream_len, 32, "total_bitstream_len")
    w.put(h.reserved_len, 16, "reserved_len")
    w.put(len(h.segments), 16, "num_segments")
    for s in h.segments:
        w.put(s.pass_index, 8, "segment pass_index")
        w.put(s.band_code, 4, "segment band_code")
        w.put(s.k, 4, "segment k")
        w.put(s.bits_embedded, 24, "segment bits")
    for t in h.threshold_tenths:
        w.put(t, 8, "band threshold")
    w.put(h.bias_tenths, 8, "bias")
    w.put(h.l_ulcf_size, 16, "l_ulcf_size")
    w.put(h.n_subbands, 4, "L")
    for u in h.f_threshold_units:
        w.put(u, 16, "f_threshold")
    w.put(h.k_max, 8, "K")
    w.put(int(h.poh_mode), 1)
    w.put(h.tau1, 8, "tau1")
    w.put(h.tau2, 8, "tau2")
    w.put(len(h.ou_entries), 16, "ou_count")
    for e in h.ou_entries:
        w.put(e.pass_index, 8, "ou pass_index")
        w.put(e.raster_index, 32, "ou raster_index")
        w.put(int(e.direction), 1)
    w.put(crc16(w.bits), 16)
    if len(w.bits) > h.reserved_len:
        raise HeaderError(f"header needs {len(w.bits)} bits but reserved_len is {h.reserved_len}")
    return np.array(w.bits, dtype=np.uint8)


def decode_header(bits) -> OverheadHeader:
    """Parse a header from the start of ``bits``; trailing padding is ignored."""
    r = BitReader(bits)
    if r.get(16) != MAGIC:
        raise HeaderError("bad magic: no embedded header found")
    version = r.get(8)
    if version != VERSION:
        raise HeaderError(f"unsupported header version {version}")
    start_color = ColorParity(r.get(1))
    total = r.get(32)
    reserved_len = r.get(16)
    segments = tuple(Segment(r.get(8), r.get(4), r.get(4), r.get(24)) for _ in range(r.get(16)))
    thresholds = tuple(r.get(8) for _ in range(6))
    bias = r.get(8)
    l_ulcf = r.get(16)
    n_sub = r.get(4)
    if n_sub < 1:
        raise HeaderError("inconsistent header: sub-band count is zero")
    f_units = tuple(r.get(16) for _ in range(n_sub - 1))
    k_max = r.get(8)
    poh_mode = PohMode(r.get(1))
    tau1 = r.get(8)
    tau2 = r.get(8)
    entries = tuple(OuEntry(r.get(8), r.get(32), ClampDirection(r.get(1))) for _ in range(r.get(16)))
    body_end = r.pos
    stored_crc = r.get(16)
    if crc16(r.bits[:body_end]) != stored_crc:
        raise HeaderError("crc mismatch: header is corrupted")
    h = OverheadHeader(start_color, total, reserved_len, segments, thresholds, bias, l_ulcf, f_units,
                       k_max, poh_mode, tau1, tau2, entries)
    _validate(h)
    if reserved_len < r.pos:
        raise HeaderError("inconsistent header: reserved_len shorter than the header itself")
    return h
