"""Zigzag reordering of 8x8 blocks (ITU-T T.81 scan order)."""

import numpy as np

# ZIGZAG_INDEX[k] = row-major flat position of zigzag index k.
ZIGZAG_INDEX = np.array([
    0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
], dtype=np.int64)

# INVERSE_INDEX[flat] = zigzag position of row-major flat index.
INVERSE_INDEX = np.empty(64, dtype=np.int64)
INVERSE_INDEX[ZIGZAG_INDEX] = np.arange(64)


def zigzag_scan(grid):
    """8x8 grid -> 64-vector in zigzag order."""
    grid = np.asarray(grid)
    if grid.size != 64:
        raise ValueError("zigzag_scan expects 64 entries")
    return grid.reshape(64)[ZIGZAG_INDEX].copy()


def zigzag_unscan(vec):
    """64-vector in zigzag order -> 8x8 grid."""
    vec = np.asarray(vec)
    if vec.size != 64:
        raise ValueError("zigzag_unscan expects 64 entries")
    grid = np.empty(64, dtype=vec.dtype)
    grid[ZIGZAG_INDEX] = vec.reshape(64)
    return grid.reshape(8, 8)
