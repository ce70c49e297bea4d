"""Multi-level embedding and extraction.

Bitstream layout: the original LSBs of the reserved pixels that will carry
the header, followed by the payload. The first ``ceil(n/2)`` bits go into
passes of the start color, the rest into passes of the other color. Pass
``p`` targets the start color when ``p`` is even; level ``p // 2`` consists
of passes ``2l`` and ``2l + 1``.

Within a pass only target pixels change and every quantity used to order
them (prediction, cell frequency, existence profile, OU class) depends on
predictor-color pixels or is invariant under embedding, so the receiver
rebuilds the identical order from the marked image.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .bands import Band, BandThresholds, cell_frequency_scaled, classify_bands
from .bits import as_bits
from .errors import (CapacityError, ConfigError, ExtractionError, HeaderOverflowError,
                     ImageTooSmallError)
from .header import (SEGMENT_BITS, OverheadHeader, Segment, decode_header, encode_header,
                     header_bit_length)
from .hia import (BandEmpty, PohMode, SvCandidate, argmax_poh, candidate_table, pe_histogram,
                  plan_segment)
from .image import MIN_SIDE, ColorParity, GrayImage, psnr, reserved_region, site_grid
from .ou import OuEntry, TauConfig, fix_red, restore_red, yellow_mask
from .predictor import (SvPair, carrying_mask, modify_errors, predict_sites, recover_errors,
                        serviceable_mask)
from .spep import ExistenceProfile, FT_SCALE, profile_from_predictions, subband_indices, threshold_units

log = logging.getLogger(__name__)

MAX_RESERVED_BITS = 0xFFFF
MAX_HEADER_ATTEMPTS = 64


@dataclass(frozen=True)
class EmbedConfig:
    thresholds: BandThresholds = field(default_factory=BandThresholds)
    l_ulcf_size: int = 3000
    f_thresholds: tuple[float, ...] = (0.01,)
    k_max: int = 5
    poh_mode: PohMode = PohMode.TABLE2
    tau: TauConfig = field(default_factory=TauConfig)
    max_levels: int = 8
    start_color: ColorParity = ColorParity.WHITE
    #: Embedder-only: skip a band whose exhaustion plan carries fewer bits
    #: than this. A segment costs SEGMENT_BITS of header plus as many bits of
    #: reserved-LSB prefix, so smaller ones lose capacity.
    min_segment_bits: int = 2 * SEGMENT_BITS

    def __post_init__(self):
        object.__setattr__(self, "f_thresholds", tuple(self.f_thresholds))
        object.__setattr__(self, "poh_mode", PohMode(self.poh_mode))
        object.__setattr__(self, "start_color", ColorParity(self.start_color))
        try:
            self.f_units
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if max(self.thresholds.tenths) > 255 or self.thresholds.bias_tenths > 255:
            raise ConfigError("band thresholds and bias must not exceed 25.5")
        if not 1 <= self.l_ulcf_size <= 0xFFFF:
            raise ConfigError(f"l_ulcf_size must be in 1..65535, got {self.l_ulcf_size}")
        if len(self.f_thresholds) > 5:
            raise ConfigError("at most 6 sub-bands (5 f thresholds) are supported")
        if not 1 <= self.k_max <= 15:
            raise ConfigError(f"K must be in 1..15, got {self.k_max}")
        if not 1 <= self.max_levels <= 128:
            raise ConfigError(f"max_levels must be in 1..128, got {self.max_levels}")
        if self.min_segment_bits < 0:
            raise ConfigError("min_segment_bits must be >= 0")

    @property
    def f_units(self) -> tuple[int, ...]:
        return threshold_units(self.f_thresholds)

    @property
    def n_subbands(self) -> int:
        return len(self.f_thresholds) + 1

    @classmethod
    def from_header(cls, h: OverheadHeader) -> "EmbedConfig":
        return cls(
            thresholds=BandThresholds.from_tenths(h.threshold_tenths, h.bias_tenths),
            l_ulcf_size=h.l_ulcf_size,
            f_thresholds=tuple(u / FT_SCALE for u in h.f_threshold_units),
            k_max=h.k_max,
            poh_mode=h.poh_mode,
            tau=TauConfig(h.tau1, h.tau2),
            start_color=h.start_color,
        )

    def as_dict(self) -> dict:
        t = self.thresholds
        return {
            "thresholds": [t.t_ulcf, t.t_vlcf, t.t_lcf, t.t_mcf, t.t_hcf, t.t_vhcf],
            "bias": t.bias_per_pass,
            "l_ulcf_size": self.l_ulcf_size,
            "f_thresholds": list(self.f_thresholds),
            "subbands": self.n_subbands,
            "k": self.k_max,
            "poh_mode": self.poh_mode.name.lower(),
            "tau1": self.tau.tau1,
            "tau2": self.tau.tau2,
            "max_levels": self.max_levels,
            "start_color": self.start_color.name.lower(),
            "min_segment_bits": self.min_segment_bits,
        }


def band_labels(n_subbands: int) -> list[str]:
    if n_subbands == 1:
        low = ["ULCF", "VLCF"]
    else:
        low = [f"ULCF{s}" for s in range(1, n_subbands + 1)] + [f"VLCF{s}" for s in range(1, n_subbands + 1)]
    return low + ["LCF", "MCF", "HCF", "VHCF"]


@dataclass
class PassLayout:
    """Everything a pass needs about its target sites, in site-grid order."""

    pass_index: int
    color: ColorParity
    rows: np.ndarray
    cols: np.ndarray
    pred: np.ndarray
    yellow: np.ndarray
    f_scaled: np.ndarray
    bands: np.ndarray
    codes: np.ndarray
    profile: ExistenceProfile
    groups: list[np.ndarray]

    def errors(self, arr: np.ndarray, pos: np.ndarray) -> np.ndarray:
        return arr[self.rows[pos], self.cols[pos]] - self.pred[pos]


def compute_layout(arr: np.ndarray, color: ColorParity, pass_index: int, cfg: EmbedConfig) -> PassLayout:
    height, width = arr.shape
    rows, cols = site_grid(height, width, color)
    pred = predict_sites(arr, rows, cols)
    yellow = yellow_mask(arr[rows, cols], pred, cfg.tau)
    f = cell_frequency_scaled(arr, rows, cols)
    bands = classify_bands(f, cfg.thresholds.at_pass(pass_index))

    ulcf = np.flatnonzero(~yellow & (bands == Band.ULCF))
    # site-grid order is raster order, so a stable sort on f breaks ties by raster index
    l_ulcf = ulcf[np.argsort(f[ulcf], kind="stable")][:cfg.l_ulcf_size]
    profile = profile_from_predictions(pred, pred[l_ulcf], l_ulcf.size)

    n_sub = cfg.n_subbands
    sub = subband_indices(pred, profile, cfg.f_units)
    codes = np.where(bands == Band.ULCF, sub,
                     np.where(bands == Band.VLCF, n_sub + sub, 2 * n_sub + bands - 2))
    codes[(bands == Band.UHCF) | yellow] = -1

    n_codes = 2 * n_sub + 4
    order = np.lexsort((np.arange(codes.size), f, codes))
    sorted_codes = codes[order]
    bounds = np.searchsorted(sorted_codes, np.arange(-1, n_codes + 1))
    groups = [order[bounds[c + 1]:bounds[c + 2]] for c in range(n_codes)]
    return PassLayout(pass_index, color, rows, cols, pred, yellow, f, bands, codes, profile, groups)


def pass_layout(img: GrayImage, color: ColorParity, pass_index: int = 0, cfg: EmbedConfig | None = None) -> PassLayout:
    return compute_layout(img.to_array(np.int64), ColorParity(color), pass_index, cfg or EmbedConfig())


@dataclass
class EmbedReport:
    payload_bits: int
    bitstream_bits: int
    reserved_bits: int
    header_bits: int
    levels: int
    psnr: float
    segments: list[Segment]
    ou_entries: list[OuEntry]
    config: EmbedConfig

    def summary(self) -> dict:
        return {
            "ec_bits": self.payload_bits,
            "bitstream_bits": self.bitstream_bits,
            "reserved_bits": self.reserved_bits,
            "header_bits": self.header_bits,
            "levels": self.levels,
            "psnr_db": self.psnr,
            "segments": len(self.segments),
            "ou_entries": len(self.ou_entries),
        }


def _trace_record(layout: PassLayout) -> dict:
    return {
        "pass_index": layout.pass_index,
        "color": layout.color,
        "yellow": layout.yellow.copy(),
        "codes": layout.codes.copy(),
    }


def _run_passes(arr: np.ndarray, bitstream: np.ndarray, cfg: EmbedConfig, trace):
    n = bitstream.size
    first = (n + 1) // 2
    halves = (bitstream[:first], bitstream[first:])
    used = [0, 0]
    segments: list[Segment] = []
    entries: list[OuEntry] = []
    level_bits = 0
    for p in range(2 * cfg.max_levels):
        slot = p % 2
        if slot == 0:
            level_bits = 0
        if used[0] == halves[0].size and used[1] == halves[1].size:
            break
        need = halves[slot].size - used[slot]
        if need:
            color = cfg.start_color if slot == 0 else cfg.start_color.other
            layout = compute_layout(arr, color, p, cfg)
            if trace is not None:
                trace.append(_trace_record(layout))
            for code, pos in enumerate(layout.groups):
                if need == 0:
                    break
                if pos.size == 0:
                    continue
                e = layout.errors(arr, pos)
                table = candidate_table(pe_histogram(e), cfg.k_max, cfg.poh_mode)
                try:
                    plan = plan_segment(table, need, cfg.poh_mode)
                except BandEmpty:
                    continue
                if plan.exhausts_band and plan.bits_to_embed < cfg.min_segment_bits:
                    continue
                carry = np.flatnonzero(serviceable_mask(e, plan.sv))
                cut = carry[plan.bits_to_embed - 1] + 1
                chunk = halves[slot][used[slot]:used[slot] + plan.bits_to_embed]
                marked_e = modify_errors(e[:cut], plan.sv, chunk)
                hit = pos[:cut]
                arr[layout.rows[hit], layout.cols[hit]] = layout.pred[hit] + marked_e
                segments.append(Segment(p, code, plan.k, plan.bits_to_embed))
                used[slot] += plan.bits_to_embed
                need -= plan.bits_to_embed
                level_bits += plan.bits_to_embed
            if arr.min() < 0 or arr.max() > 255:
                fixed, new_entries = fix_red(arr, p)
                arr[...] = fixed.pixels
                entries.extend(new_entries)
        if slot == 1 and level_bits == 0:
            break
    remaining = n - used[0] - used[1]
    if remaining:
        raise CapacityError(f"{remaining} of {n} bitstream bits do not fit within {cfg.max_levels} level(s)")
    return segments, entries


def _header_for(cfg: EmbedConfig, segments, entries, total: int, reserved_len: int) -> OverheadHeader:
    return OverheadHeader(
        start_color=cfg.start_color,
        total_bitstream_len=total,
        reserved_len=reserved_len,
        segments=tuple(segments),
        threshold_tenths=cfg.thresholds.tenths,
        bias_tenths=cfg.thresholds.bias_tenths,
        l_ulcf_size=cfg.l_ulcf_size,
        f_threshold_units=cfg.f_units,
        k_max=cfg.k_max,
        poh_mode=cfg.poh_mode,
        tau1=cfg.tau.tau1,
        tau2=cfg.tau.tau2,
        ou_entries=tuple(entries),
    )


def _check_size(img: GrayImage) -> None:
    if img.width < MIN_SIDE or img.height < MIN_SIDE:
        raise ImageTooSmallError(f"image is {img.width}x{img.height}; at least {MIN_SIDE}x{MIN_SIDE} is required")


def embed(cover: GrayImage, payload, cfg: EmbedConfig | None = None, *, trace: list | None = None):
    """Hide ``payload`` (a 0/1 sequence) in ``cover``; returns ``(marked, report)``.

    If ``trace`` is a list, one record per executed pass of the final
    attempt is appended to it (OU classes and band codes per site).
    """
    cfg = cfg or EmbedConfig()
    _check_size(cover)
    payload = as_bits(payload)
    region = reserved_region(cover.height, cover.width)[:MAX_RESERVED_BITS]
    if payload.size + region.size >= 2 ** 32:
        raise CapacityError("payload too long for the 32-bit length field")

    reserved_len = header_bit_length(1, cfg.n_subbands, 0)
    for _ in range(MAX_HEADER_ATTEMPTS):
        if reserved_len > region.size:
            raise HeaderOverflowError(
                f"header needs {reserved_len} bits but the reserved region holds {region.size}; "
                "use a larger image, a smaller payload, or raise tau1/tau2 if OU entries dominate")
        attempt_trace = [] if trace is not None else None
        arr = cover.to_array(np.int64)
        flat = arr.reshape(-1)
        slots = region[:reserved_len]
        prefix = (flat[slots] & 1).astype(np.uint8)
        flat[slots] &= ~1
        bitstream = np.concatenate([prefix, payload])
        segments, entries = _run_passes(arr, bitstream, cfg, attempt_trace)
        needed = header_bit_length(len(segments), cfg.n_subbands, len(entries))
        if needed <= reserved_len:
            break
        log.debug("header needs %d bits, reserved %d; retrying", needed, reserved_len)
        reserved_len = needed
    else:
        raise HeaderOverflowError("header size did not converge")

    header = _header_for(cfg, segments, entries, bitstream.size, reserved_len)
    hbits = encode_header(header)
    stored = np.zeros(reserved_len, dtype=np.int64)
    stored[:hbits.size] = hbits
    flat[slots] |= stored
    marked = GrayImage(arr)
    if trace is not None:
        trace.extend(attempt_trace)
    levels = segments[-1].pass_index // 2 + 1 if segments else 0
    report = EmbedReport(payload.size, bitstream.size, reserved_len, int(hbits.size), levels,
                         psnr(cover, marked), segments, entries, cfg)
    return marked, report


def extract(marked: GrayImage, *, trace: list | None = None):
    """Recover ``(cover, payload_bits)`` from a marked image."""
    _check_size(marked)
    region = reserved_region(marked.height, marked.width)[:MAX_RESERVED_BITS]
    header = decode_header(marked.pixels.reshape(-1)[region] & 1)
    if header.reserved_len > region.size:
        raise ExtractionError("header claims more reserved bits than the image holds")
    cfg = EmbedConfig.from_header(header)

    arr = marked.to_array(np.int64)
    slots = region[:header.reserved_len]
    arr.reshape(-1)[slots] &= ~1

    by_pass: dict[int, list[Segment]] = {}
    for s in header.segments:
        by_pass.setdefault(s.pass_index, []).append(s)
    ou_by_pass: dict[int, list[OuEntry]] = {}
    for e in header.ou_entries:
        ou_by_pass.setdefault(e.pass_index, []).append(e)
    if set(ou_by_pass) - set(by_pass):
        raise ExtractionError("OU entries reference a pass without segments")

    n_codes = 2 * cfg.n_subbands + 4
    recovered: dict[tuple[int, int], np.ndarray] = {}
    for p in sorted(by_pass, reverse=True):
        if p in ou_by_pass:
            arr = restore_red(arr, ou_by_pass[p])
        color = cfg.start_color if p % 2 == 0 else cfg.start_color.other
        layout = compute_layout(arr, color, p, cfg)
        if trace is not None:
            trace.append(_trace_record(layout))
        for s in by_pass[p]:
            if s.band_code >= n_codes:
                raise ExtractionError(f"segment {s} has an unknown band code")
            pos = layout.groups[s.band_code]
            ep = layout.errors(arr, pos)
            sv = SvPair.from_index(s.k)
            carry = np.flatnonzero(carrying_mask(ep, sv))
            if carry.size < s.bits_embedded:
                raise ExtractionError(
                    f"segment {s} expects {s.bits_embedded} bits but only {carry.size} sites carry one")
            cut = carry[s.bits_embedded - 1] + 1
            e, bits = recover_errors(ep[:cut], sv)
            hit = pos[:cut]
            arr[layout.rows[hit], layout.cols[hit]] = layout.pred[hit] + e
            recovered[(p, s.band_code)] = bits
    if arr.min() < 0 or arr.max() > 255:
        raise ExtractionError("recovered image holds values outside [0, 255]")

    keys = sorted(recovered)
    start_half = [recovered[k] for k in keys if k[0] % 2 == 0]
    other_half = [recovered[k] for k in keys if k[0] % 2 == 1]
    parts = start_half + other_half
    bitstream = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint8)
    n_start = sum(b.size for b in start_half)
    if bitstream.size != header.total_bitstream_len or n_start != (bitstream.size + 1) // 2:
        raise ExtractionError("recovered bitstream length disagrees with the header")
    arr.reshape(-1)[slots] |= bitstream[:header.reserved_len].astype(np.int64)
    return GrayImage(arr), bitstream[header.reserved_len:].astype(np.uint8)


@dataclass(frozen=True)
class BandCapacity:
    pass_index: int
    color: ColorParity
    band_code: int
    label: str
    sites: int
    n_sv: tuple[int, ...]
    k_poh: int | None
    capacity: int


@dataclass
class CapacityTable:
    rows: list[BandCapacity]

    @property
    def total(self) -> int:
        return sum(r.capacity for r in self.rows)

    def pass_total(self, pass_index: int) -> int:
        return sum(r.capacity for r in self.rows if r.pass_index == pass_index)


def band_table(errors: np.ndarray, cfg: EmbedConfig) -> list[SvCandidate]:
    return candidate_table(pe_histogram(errors), cfg.k_max, cfg.poh_mode)


def capacity_scan(cover: GrayImage, cfg: EmbedConfig | None = None) -> CapacityTable:
    """Level-1 capacity per band, both colors, computed on the unmodified cover."""
    cfg = cfg or EmbedConfig()
    _check_size(cover)
    arr = cover.to_array(np.int64)
    labels = band_labels(cfg.n_subbands)
    rows = []
    for p in (0, 1):
        color = cfg.start_color if p == 0 else cfg.start_color.other
        layout = compute_layout(arr, color, p, cfg)
        for code, pos in enumerate(layout.groups):
            e = layout.errors(arr, pos)
            hist = pe_histogram(e)
            table = candidate_table(hist, cfg.k_max, cfg.poh_mode)
            n_sv = tuple(hist.get(k - 1, 0) + hist.get(-k, 0) for k in range(1, cfg.k_max + 1))
            if table and any(r.n_sv for r in table):
                best = argmax_poh(table, cfg.poh_mode)
                k_poh, cap = best.k, best.n_sv
            else:
                k_poh, cap = None, 0
            rows.append(BandCapacity(p, color, code, labels[code], int(pos.size), n_sv, k_poh, cap))
    return CapacityTable(rows)
