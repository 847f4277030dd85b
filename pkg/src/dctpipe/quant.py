"""Quantization tables and the quantize/dequantize pair."""

from dataclasses import dataclass, field

import numpy as np

from .kernels import round_half_away
from .zigzag import zigzag_scan, zigzag_unscan

# T.81 Annex K example tables, natural (row-major) order.
_BASE_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

_BASE_CHROMA = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)


@dataclass(frozen=True)
class QuantTable:
    """64 divisors in zigzag order, each in [1, 255]."""
    divisors: np.ndarray = field(repr=False)

    def __post_init__(self):
        divisors = np.asarray(self.divisors, dtype=np.int64)
        if divisors.size != 64:
            raise ValueError("quant table needs 64 divisors")
        if (divisors < 1).any():
            raise ValueError("quant divisors must be >= 1")
        object.__setattr__(self, "divisors", divisors.reshape(64))

    @property
    def grid(self):
        """Divisors as an 8x8 natural-order grid."""
        return zigzag_unscan(self.divisors)


def quantize(dct_block, table):
    """8x8 DCT coefficients -> 64 quantized integers, zigzag order."""
    ratios = np.asarray(dct_block, dtype=np.float64) / table.grid
    return zigzag_scan(round_half_away(ratios)).astype(np.int32)


def dequantize(values, table):
    """64 zigzag quantized integers -> 8x8 dequantized coefficients."""
    values = np.asarray(values, dtype=np.int64).reshape(64)
    return zigzag_unscan((values * table.divisors).astype(np.float64))


def quality_to_quant_tables(quality):
    """IJG 1-100 quality scaling of the Annex K tables -> (luma, chroma)."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    if quality < 50:
        scale = 5000 // quality
    else:
        scale = 200 - 2 * quality
    tables = []
    for base in (_BASE_LUMA, _BASE_CHROMA):
        scaled = (base * scale + 50) // 100
        scaled = np.clip(scaled, 1, 255)
        tables.append(QuantTable(zigzag_scan(scaled)))
    return tables[0], tables[1]
