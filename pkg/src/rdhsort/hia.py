"""Hiding intensity analysis: choose an SV pair per band segment.

For each candidate ``k`` (``sv = (k-1, -k)``) the band's prediction-error
histogram gives ``n_sv`` (errors that carry a bit) and ``n_usv`` (errors
that get shifted). Hiding intensity is ``n_sv / n_usv``; power of hiding
weights it by capacity and picks the pair used when a band is exhausted.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .predictor import SvPair


class PohMode(enum.IntEnum):
    #: ``n_sv**2 / n_usv``, the squared form.
    EQ14 = 0
    #: ``n_sv * sqrt(n_sv / n_usv)``, which reproduces the worked table.
    TABLE2 = 1


class BandEmpty(Exception):
    """No candidate in the table has any serviceable value."""


def pe_histogram(errors) -> Counter:
    if isinstance(errors, np.ndarray):
        vals, counts = np.unique(errors, return_counts=True)
        return Counter(dict(zip(vals.tolist(), counts.tolist())))
    return Counter(int(e) for e in errors)


def tally(hist, sv: SvPair) -> tuple[int, int]:
    n_sv = hist.get(sv.sv_p, 0) + hist.get(sv.sv_n, 0)
    n_usv = sum(c for e, c in hist.items() if e > sv.sv_p or e < sv.sv_n)
    return n_sv, n_usv


def hiding_intensity(n_sv: int, n_usv: int) -> float:
    if n_sv == 0 and n_usv == 0:
        raise ValueError("hiding intensity undefined for an empty tally")
    if n_usv == 0:
        return math.inf
    return n_sv / n_usv


def power_of_hiding(n_sv: int, n_usv: int, mode: PohMode = PohMode.TABLE2) -> float:
    if n_usv == 0:
        return math.inf if n_sv else 0.0
    if mode is PohMode.EQ14:
        return n_sv * n_sv / n_usv
    return n_sv * math.sqrt(n_sv / n_usv)


@dataclass(frozen=True)
class SvCandidate:
    k: int
    sv: SvPair
    n_sv: int
    n_usv: int
    hi: float
    poh: float


@dataclass(frozen=True)
class SegmentPlan:
    sv: SvPair
    k: int
    bits_to_embed: int
    exhausts_band: bool


def candidate_table(hist, k_max: int = 5, mode: PohMode = PohMode.TABLE2) -> list[SvCandidate]:
    """Rows for ``k = 1..k_max`` in raw order; rows with an empty tally are dropped."""
    rows = []
    for k in range(1, k_max + 1):
        sv = SvPair.from_index(k)
        n_sv, n_usv = tally(hist, sv)
        if n_sv == 0 and n_usv == 0:
            continue
        rows.append(SvCandidate(k, sv, n_sv, n_usv, hiding_intensity(n_sv, n_usv),
                                power_of_hiding(n_sv, n_usv, mode)))
    return rows


def table_from_counts(counts, mode: PohMode = PohMode.TABLE2) -> list[SvCandidate]:
    """Build a table directly from ``(n_sv, n_usv)`` pairs listed for ``k = 1, 2, ...``."""
    return [SvCandidate(k, SvPair.from_index(k), n_sv, n_usv, hiding_intensity(n_sv, n_usv),
                        power_of_hiding(n_sv, n_usv, mode))
            for k, (n_sv, n_usv) in enumerate(counts, start=1)]


def sort_by_hi(table) -> list[SvCandidate]:
    return sorted(table, key=lambda r: (-r.hi, r.k))


def ranking_poh(row: SvCandidate, mode: PohMode = PohMode.TABLE2) -> float:
    """PoH used to pick ``k_poh``; a row with no shifted values counts as one.

    With the raw infinite sentinel a row holding a handful of serviceable
    values and no shifts would beat every row of real capacity.
    """
    return power_of_hiding(row.n_sv, max(row.n_usv, 1), mode)


def argmax_poh(table, mode: PohMode = PohMode.TABLE2) -> SvCandidate:
    return max(table, key=lambda r: (ranking_poh(r, mode), r.n_sv, -r.k))


def plan_segment(table, n_b: int, mode: PohMode = PohMode.TABLE2) -> SegmentPlan:
    """Pick the SV pair for the next segment given ``n_b`` bits still to hide."""
    if n_b <= 0:
        raise ValueError("n_b must be positive")
    if not table or all(r.n_sv == 0 for r in table):
        raise BandEmpty("no serviceable values in scope")
    best = argmax_poh(table, mode)
    if n_b > best.n_sv:
        return SegmentPlan(best.sv, best.k, best.n_sv, True)
    for row in sort_by_hi(table):
        # n_b / n_usv(k) <= HI(k)  <=>  n_b <= n_sv(k)
        if n_b <= row.n_sv:
            return SegmentPlan(row.sv, row.k, n_b, False)
    bits = min(n_b, best.n_sv)
    return SegmentPlan(best.sv, best.k, bits, bits == best.n_sv)
