"""Reversible data hiding for 8-bit grayscale images.

Prediction-error histogram shifting over a checkerboard (rhombus)
predictor, with pixels ordered smooth-to-rough by cell frequency band,
ULCF/VLCF split by pixel existence probability, and the SV pair chosen per
band by hiding intensity analysis.
"""

from .bands import Band, BandThresholds
from .bits import bits_to_bytes, bytes_to_bits, random_bits
from .codec import EmbedConfig, EmbedReport, capacity_scan, embed, extract
from .errors import RdhError
from .hia import PohMode
from .image import ColorParity, GrayImage, load_pgm, psnr, read_pgm, save_pgm, write_pgm
from .ou import TauConfig

__all__ = [
    "Band", "BandThresholds", "ColorParity", "EmbedConfig", "EmbedReport", "GrayImage", "PohMode",
    "RdhError", "TauConfig", "bits_to_bytes", "bytes_to_bits", "capacity_scan", "embed", "extract",
    "load_pgm", "psnr", "random_bits", "read_pgm", "save_pgm", "write_pgm",
]
