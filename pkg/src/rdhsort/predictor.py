"""Rhombus (chessboard) predictor and prediction-error shifting.

A target pixel is predicted from its four direct neighbours, which always
have the opposite checkerboard color. Errors equal to one of the two
serviceable values carry a bit; errors beyond them are shifted outward by
one to make room.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SvPair:
    """Serviceable-value thresholds ``sv_p >= 0`` and ``sv_n < 0``."""

    sv_p: int
    sv_n: int

    def __post_init__(self):
        if self.sv_p < 0 or self.sv_n > -1:
            raise ValueError(f"invalid SV pair ({self.sv_p}, {self.sv_n})")

    @classmethod
    def from_index(cls, k: int) -> "SvPair":
        """Candidate ``k`` (1-based) of the symmetric family ``(k-1, -k)``."""
        if k < 1:
            raise ValueError(f"candidate index must be >= 1, got {k}")
        return cls(k - 1, -k)


def predict(up: int, right: int, down: int, left: int) -> int:
    # round half up
    return (up + right + down + left + 2) // 4


def prediction_error(h: int, hp: int) -> int:
    return h - hp


def modify_error(e: int, sv: SvPair, bit: int | None = None) -> int:
    if e > sv.sv_p:
        return e + 1
    if e < sv.sv_n:
        return e - 1
    if e == sv.sv_p or e == sv.sv_n:
        if bit is None:
            raise ValueError(f"error {e} is serviceable under {sv} and needs a bit")
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        # sign(0) counts as +1 on the sv_p branch
        return e + bit if e == sv.sv_p else e - bit
    return e


def recover_error(ep: int, sv: SvPair) -> tuple[int, int | None]:
    if ep == sv.sv_p or ep == sv.sv_n:
        return ep, 0
    if ep == sv.sv_p + 1:
        return sv.sv_p, 1
    if ep == sv.sv_n - 1:
        return sv.sv_n, 1
    if ep > sv.sv_p + 1:
        return ep - 1, None
    if ep < sv.sv_n - 1:
        return ep + 1, None
    return ep, None


# Vectorised forms used by the codec.

def predict_sites(arr: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    total = arr[rows - 1, cols] + arr[rows, cols + 1] + arr[rows + 1, cols] + arr[rows, cols - 1]
    return (total + 2) // 4


def serviceable_mask(e: np.ndarray, sv: SvPair) -> np.ndarray:
    return (e == sv.sv_p) | (e == sv.sv_n)


def modify_errors(e: np.ndarray, sv: SvPair, bits: np.ndarray) -> np.ndarray:
    """Shift ``e``; ``bits`` is aligned with the serviceable entries of ``e``, in order."""
    out = e.copy()
    out[e > sv.sv_p] += 1
    out[e < sv.sv_n] -= 1
    carry = serviceable_mask(e, sv)
    b = np.zeros_like(e)
    b[carry] = bits
    out[e == sv.sv_p] += b[e == sv.sv_p]
    out[e == sv.sv_n] -= b[e == sv.sv_n]
    return out


def carrying_mask(ep: np.ndarray, sv: SvPair) -> np.ndarray:
    """Marked errors that hold a bit."""
    return (ep == sv.sv_p) | (ep == sv.sv_p + 1) | (ep == sv.sv_n) | (ep == sv.sv_n - 1)


def recover_errors(ep: np.ndarray, sv: SvPair) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`modify_errors`; returns the errors and the carried bits in order."""
    carry = carrying_mask(ep, sv)
    bits = ((ep == sv.sv_p + 1) | (ep == sv.sv_n - 1))[carry].astype(np.uint8)
    e = ep.copy()
    e[ep > sv.sv_p] -= 1
    e[ep < sv.sv_n] += 1
    return e, bits
