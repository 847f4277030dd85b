"""Backend selection for the hot numeric kernels.

Every kernel exists in two flavors: a numba ``@njit`` build of the loop
implementation and a pure-numpy (or plain-Python, for the bit-serial scan
decoder) fallback.  Set ``DCTPIPE_NO_NUMBA=1`` to force the fallback path;
otherwise numba is used when importable.  Both flavors stay reachable under
their ``*_numpy`` / ``*_numba`` names so the benchmark can compare them.
"""

import os

import numpy as np

_DISABLE = os.environ.get("DCTPIPE_NO_NUMBA", "").lower() in ("1", "true", "yes")

NUMBA_AVAILABLE = False
if not _DISABLE:
    try:
        from numba import njit

        NUMBA_AVAILABLE = True
    except ImportError:
        pass

if not NUMBA_AVAILABLE:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# Orthonormal 8-point DCT-II basis: A[i, x] = c_i/2 * cos((2x+1) i pi / 16),
# c_0 = 1/sqrt(2), c_k = 1 otherwise.  The 2-D transform is A @ block @ A.T,
# which carries the overall 1/4 scale.
_i = np.arange(8).reshape(8, 1).astype(np.float64)
_x = np.arange(8).reshape(1, 8).astype(np.float64)
DCT_BASIS = 0.5 * np.cos((2.0 * _x + 1.0) * _i * np.pi / 16.0)
DCT_BASIS[0, :] *= 1.0 / np.sqrt(2.0)
DCT_BASIS = np.ascontiguousarray(DCT_BASIS)
del _i, _x


def dct_blocks_numpy(blocks):
    """2-D DCT-II of a stack of 8x8 blocks, shape (n, 8, 8) float64."""
    return np.einsum("ix,nxy,jy->nij", DCT_BASIS, blocks, DCT_BASIS, optimize=True)


def idct_blocks_numpy(coeffs):
    """Inverse of dct_blocks_numpy (orthonormal, so the transpose basis)."""
    return np.einsum("ix,nij,jy->nxy", DCT_BASIS, coeffs, DCT_BASIS, optimize=True)


def _dct_blocks_loop(blocks, basis, out):
    n = blocks.shape[0]
    tmp = np.empty((8, 8), dtype=np.float64)
    for b in range(n):
        for i in range(8):
            for y in range(8):
                s = 0.0
                for x in range(8):
                    s += basis[i, x] * blocks[b, x, y]
                tmp[i, y] = s
        for i in range(8):
            for j in range(8):
                s = 0.0
                for y in range(8):
                    s += tmp[i, y] * basis[j, y]
                out[b, i, j] = s


def _idct_blocks_loop(coeffs, basis, out):
    n = coeffs.shape[0]
    tmp = np.empty((8, 8), dtype=np.float64)
    for b in range(n):
        for x in range(8):
            for j in range(8):
                s = 0.0
                for i in range(8):
                    s += basis[i, x] * coeffs[b, i, j]
                tmp[x, j] = s
        for x in range(8):
            for y in range(8):
                s = 0.0
                for j in range(8):
                    s += tmp[x, j] * basis[j, y]
                out[b, x, y] = s


_dct_blocks_jit = njit(cache=True)(_dct_blocks_loop)
_idct_blocks_jit = njit(cache=True)(_idct_blocks_loop)


def dct_blocks_numba(blocks):
    out = np.empty_like(blocks)
    _dct_blocks_jit(blocks, DCT_BASIS, out)
    return out


def idct_blocks_numba(coeffs):
    out = np.empty_like(coeffs)
    _idct_blocks_jit(coeffs, DCT_BASIS, out)
    return out


# ---------------------------------------------------------------------------
# Huffman scan decoding (T.81 F.2.2 canonical decode).  Bit-serial, so the
# fallback is the same loop uncompiled; there is no vectorized formulation.
# ---------------------------------------------------------------------------

def _decode_scan_loop(data, plan, dc_mincode, dc_maxcode, dc_valptr, dc_huffval,
                      ac_mincode, ac_maxcode, ac_valptr, ac_huffval,
                      predictors, out):
    """Decode one entropy-coded interval into zigzag coefficient rows.

    data: unstuffed scan bytes.
    plan: (nblocks, 3) int32 rows [component, dc_table, ac_table] in scan order.
    predictors: per-component DC predictor, updated in place.
    out: (nblocks, 64) int32.
    Returns (error_code, blocks_done): 0 ok, 1 bad Huffman code, 2 truncated,
    3 run overflow past position 63.
    """
    pos = 0
    bit = 0
    nbytes = data.shape[0]
    nblocks = plan.shape[0]
    for blk in range(nblocks):
        comp = plan[blk, 0]
        dct = plan[blk, 1]
        act = plan[blk, 2]

        # DC size category
        code = 0
        length = 0
        while True:
            if pos >= nbytes:
                return 2, blk
            code = (code << 1) | ((int(data[pos]) >> (7 - bit)) & 1)
            bit += 1
            if bit == 8:
                bit = 0
                pos += 1
            length += 1
            if length > 16:
                return 1, blk
            if dc_maxcode[dct, length] >= 0 and code <= dc_maxcode[dct, length]:
                break
        size = dc_huffval[dct, dc_valptr[dct, length] + code - dc_mincode[dct, length]]

        diff = 0
        if size > 0:
            value = 0
            for _ in range(size):
                if pos >= nbytes:
                    return 2, blk
                value = (value << 1) | ((int(data[pos]) >> (7 - bit)) & 1)
                bit += 1
                if bit == 8:
                    bit = 0
                    pos += 1
            if value < (1 << (size - 1)):
                value -= (1 << size) - 1
            diff = value

        predictors[comp] += diff
        out[blk, 0] = predictors[comp]

        # AC coefficients
        k = 1
        while k < 64:
            code = 0
            length = 0
            while True:
                if pos >= nbytes:
                    return 2, blk
                code = (code << 1) | ((int(data[pos]) >> (7 - bit)) & 1)
                bit += 1
                if bit == 8:
                    bit = 0
                    pos += 1
                length += 1
                if length > 16:
                    return 1, blk
                if ac_maxcode[act, length] >= 0 and code <= ac_maxcode[act, length]:
                    break
            rs = ac_huffval[act, ac_valptr[act, length] + code - ac_mincode[act, length]]
            run = rs >> 4
            size = rs & 0x0F
            if size == 0:
                if run == 15:  # ZRL
                    k += 16
                    if k > 64:
                        return 3, blk
                    continue
                break  # EOB
            k += run
            if k > 63:
                return 3, blk
            value = 0
            for _ in range(size):
                if pos >= nbytes:
                    return 2, blk
                value = (value << 1) | ((int(data[pos]) >> (7 - bit)) & 1)
                bit += 1
                if bit == 8:
                    bit = 0
                    pos += 1
            if value < (1 << (size - 1)):
                value -= (1 << size) - 1
            out[blk, k] = value
            k += 1
    return 0, nblocks


decode_scan_numpy = _decode_scan_loop
decode_scan_numba = njit(cache=True)(_decode_scan_loop)


# ---------------------------------------------------------------------------
# Color transforms (full-range BT.601 as used by JFIF).
# ---------------------------------------------------------------------------

def rgb_to_ycbcr_numpy(rgb):
    """rgb: (h, w, 3) float64 -> (h, w, 3) float64 YCbCr, unclamped."""
    r = rgb[:, :, 0]
    g = rgb[:, :, 1]
    b = rgb[:, :, 2]
    out = np.empty_like(rgb)
    out[:, :, 0] = 0.299 * r + 0.587 * g + 0.114 * b
    out[:, :, 1] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    out[:, :, 2] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return out


def ycbcr_to_rgb_numpy(ycc):
    y = ycc[:, :, 0]
    cb = ycc[:, :, 1] - 128.0
    cr = ycc[:, :, 2] - 128.0
    out = np.empty_like(ycc)
    out[:, :, 0] = y + 1.402 * cr
    out[:, :, 1] = y - 0.344136 * cb - 0.714136 * cr
    out[:, :, 2] = y + 1.772 * cb
    return out


def _rgb_to_ycbcr_loop(rgb, out):
    h, w = rgb.shape[0], rgb.shape[1]
    for i in range(h):
        for j in range(w):
            r = rgb[i, j, 0]
            g = rgb[i, j, 1]
            b = rgb[i, j, 2]
            out[i, j, 0] = 0.299 * r + 0.587 * g + 0.114 * b
            out[i, j, 1] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
            out[i, j, 2] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b


def _ycbcr_to_rgb_loop(ycc, out):
    h, w = ycc.shape[0], ycc.shape[1]
    for i in range(h):
        for j in range(w):
            y = ycc[i, j, 0]
            cb = ycc[i, j, 1] - 128.0
            cr = ycc[i, j, 2] - 128.0
            out[i, j, 0] = y + 1.402 * cr
            out[i, j, 1] = y - 0.344136 * cb - 0.714136 * cr
            out[i, j, 2] = y + 1.772 * cb


_rgb_to_ycbcr_jit = njit(cache=True)(_rgb_to_ycbcr_loop)
_ycbcr_to_rgb_jit = njit(cache=True)(_ycbcr_to_rgb_loop)


def rgb_to_ycbcr_numba(rgb):
    out = np.empty_like(rgb)
    _rgb_to_ycbcr_jit(rgb, out)
    return out


def ycbcr_to_rgb_numba(ycc):
    out = np.empty_like(ycc)
    _ycbcr_to_rgb_jit(ycc, out)
    return out


if NUMBA_AVAILABLE:
    dct_blocks = dct_blocks_numba
    idct_blocks = idct_blocks_numba
    decode_scan = decode_scan_numba
    rgb_to_ycbcr_mat = rgb_to_ycbcr_numba
    ycbcr_to_rgb_mat = ycbcr_to_rgb_numba
else:
    dct_blocks = dct_blocks_numpy
    idct_blocks = idct_blocks_numpy
    decode_scan = decode_scan_numpy
    rgb_to_ycbcr_mat = rgb_to_ycbcr_numpy
    ycbcr_to_rgb_mat = ycbcr_to_rgb_numpy


def round_half_away(x):
    """Round half away from zero, elementwise."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)
