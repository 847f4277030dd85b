"""Orthonormal 8x8 block DCT-II and its inverse.

The inverse keeps an invocation counter so the partial-decode path can prove
it never ran an IDCT.
"""

import numpy as np

from . import kernels
from .kernels import round_half_away

# Incremented once per inverse-transform call (single block or batch).
IDCT_CALLS = 0


def idct_call_count():
    return IDCT_CALLS


def forward_dct(block):
    """Level-shifted 8x8 sample block -> 8x8 DCT coefficients (float64)."""
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (8, 8):
        raise ValueError("expected an 8x8 block")
    return kernels.dct_blocks(block.reshape(1, 8, 8))[0]


def inverse_dct(block):
    """8x8 coefficients -> 8x8 integer samples, clamped to [-128, 127]."""
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (8, 8):
        raise ValueError("expected an 8x8 block")
    samples = inverse_dct_blocks(block.reshape(1, 8, 8))[0]
    return np.clip(round_half_away(samples), -128, 127).astype(np.int32)


def forward_dct_blocks(blocks):
    """(n, 8, 8) float64 stack -> transformed stack."""
    return kernels.dct_blocks(np.ascontiguousarray(blocks, dtype=np.float64))


def inverse_dct_blocks(coeffs):
    """(n, 8, 8) coefficient stack -> real-valued sample stack (unrounded)."""
    global IDCT_CALLS
    IDCT_CALLS += 1
    return kernels.idct_blocks(np.ascontiguousarray(coeffs, dtype=np.float64))
