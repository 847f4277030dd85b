"""DPCM coding of per-block DC coefficients."""

import numpy as np


def dpcm_encode(dc_values):
    """DC sequence -> differences; first entry passes through unchanged."""
    dc = np.asarray(dc_values, dtype=np.int64)
    if dc.size == 0:
        raise ValueError("empty component")
    diffs = np.empty_like(dc)
    diffs[0] = dc[0]
    diffs[1:] = dc[1:] - dc[:-1]
    return diffs


def dpcm_decode(diffs):
    """Differences -> DC sequence (cumulative sum)."""
    diffs = np.asarray(diffs, dtype=np.int64)
    if diffs.size == 0:
        raise ValueError("empty component")
    return np.cumsum(diffs)
