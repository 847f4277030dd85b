"""Partial decoding: entropy decode + dequantize, no inverse DCT.

The output is the per-component grid of DCT coefficient blocks, which is the
compressed-domain representation the rest of the pipeline consumes.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .huffman import unstuff
from .kernels import round_half_away
from .stream import JpegFormatError, JpegStream, parse_stream
from .zigzag import ZIGZAG_INDEX

_RST_FIRST, _RST_LAST = 0xD0, 0xD7


@dataclass
class CoefficientPlane:
    component_id: int
    blocks_wide: int
    blocks_high: int
    blocks: np.ndarray      # (blocks_high, blocks_wide, 8, 8), natural order
    state: str              # "quantized" | "dequantized"
    quant_table_id: int

    @property
    def padded_width(self):
        return self.blocks_wide * 8

    @property
    def padded_height(self):
        return self.blocks_high * 8


def _geometry(stream):
    hmax, vmax = stream.max_h, stream.max_v
    mcus_x = math.ceil(stream.width / (8 * hmax))
    mcus_y = math.ceil(stream.height / (8 * vmax))
    return hmax, vmax, mcus_x, mcus_y


def _scan_plan(stream):
    """Block plan in scan order: (comp_idx, dc_tbl, ac_tbl) and (row, col)."""
    hmax, vmax, mcus_x, mcus_y = _geometry(stream)
    dc_ids = sorted(stream.dc_tables)
    ac_ids = sorted(stream.ac_tables)
    plan = []
    position = []
    per_mcu = []
    for ci, comp in enumerate(stream.components):
        for by in range(comp.v):
            for bx in range(comp.h):
                per_mcu.append((ci, dc_ids.index(comp.dc_table_id),
                                ac_ids.index(comp.ac_table_id), by, bx))
    for my in range(mcus_y):
        for mx in range(mcus_x):
            for ci, dct, act, by, bx in per_mcu:
                comp = stream.components[ci]
                plan.append((ci, dct, act))
                position.append((ci, my * comp.v + by, mx * comp.h + bx))
    return (np.array(plan, dtype=np.int32), np.array(position, dtype=np.int64),
            dc_ids, ac_ids, mcus_x * mcus_y, len(per_mcu))


def _table_arrays(tables, ids):
    mincode = np.zeros((len(ids), 17), dtype=np.int64)
    maxcode = np.full((len(ids), 17), -1, dtype=np.int64)
    valptr = np.zeros((len(ids), 17), dtype=np.int64)
    huffval = np.zeros((len(ids), 256), dtype=np.int64)
    for i, tid in enumerate(ids):
        t = tables[tid]
        mincode[i] = t.mincode
        maxcode[i] = t.maxcode
        valptr[i] = t.valptr
        huffval[i, :len(t.values)] = t.values
    return mincode, maxcode, valptr, huffval


def _split_restarts(data):
    """Split raw scan bytes on restart markers, preserving order."""
    segments = []
    start = 0
    i = 0
    n = len(data)
    while i < n - 1:
        if data[i] == 0xFF and _RST_FIRST <= data[i + 1] <= _RST_LAST:
            segments.append(data[start:i])
            i += 2
            start = i
        else:
            i += 1 if data[i] != 0xFF else 2
    segments.append(data[start:])
    return segments


_ERRORS = {1: "corrupt entropy stream", 2: "truncated scan", 3: "corrupt run length"}


def extract_coefficients(stream: JpegStream):
    """Entropy-decode the scan into quantized coefficient planes (no IDCT)."""
    plan, position, dc_ids, ac_ids, n_mcus, blocks_per_mcu = _scan_plan(stream)
    dc_min, dc_max, dc_ptr, dc_val = _table_arrays(stream.dc_tables, dc_ids)
    ac_min, ac_max, ac_ptr, ac_val = _table_arrays(stream.ac_tables, ac_ids)

    out = np.zeros((plan.shape[0], 64), dtype=np.int32)
    segments = _split_restarts(stream.entropy_data)
    ri = stream.restart_interval or n_mcus
    mcu_done = 0
    for segment in segments:
        if mcu_done >= n_mcus:
            break
        mcus_here = min(ri, n_mcus - mcu_done)
        lo = mcu_done * blocks_per_mcu
        hi = (mcu_done + mcus_here) * blocks_per_mcu
        data = np.frombuffer(unstuff(segment), dtype=np.uint8)
        predictors = np.zeros(len(stream.components), dtype=np.int32)
        err, _ = kernels.decode_scan(
            data, plan[lo:hi], dc_min, dc_max, dc_ptr, dc_val,
            ac_min, ac_max, ac_ptr, ac_val, predictors, out[lo:hi])
        if err:
            raise JpegFormatError(_ERRORS[err], 0)
        mcu_done += mcus_here
    if mcu_done < n_mcus:
        raise JpegFormatError("truncated scan", len(stream.entropy_data))

    planes = {}
    for ci, comp in enumerate(stream.components):
        mask = position[:, 0] == ci
        rows = position[mask, 1]
        cols = position[mask, 2]
        bh, bw = rows.max() + 1, cols.max() + 1
        zig = np.zeros((bh, bw, 64), dtype=np.int32)
        zig[rows, cols] = out[mask]
        natural = np.empty((bh, bw, 64), dtype=np.int32)
        natural[:, :, ZIGZAG_INDEX] = zig
        planes[comp.ident] = CoefficientPlane(
            component_id=comp.ident, blocks_wide=int(bw), blocks_high=int(bh),
            blocks=natural.reshape(bh, bw, 8, 8), state="quantized",
            quant_table_id=comp.quant_table_id)
    return planes


def dequantize_planes(planes, quant_tables):
    """Multiply quantized planes by their divisor tables elementwise."""
    result = {}
    for ident, plane in planes.items():
        if plane.state != "quantized":
            raise ValueError("plane already dequantized")
        if plane.quant_table_id not in quant_tables:
            raise JpegFormatError(
                f"missing quant table {plane.quant_table_id}", 0)
        grid = quant_tables[plane.quant_table_id].grid.astype(np.float64)
        result[ident] = CoefficientPlane(
            component_id=plane.component_id, blocks_wide=plane.blocks_wide,
            blocks_high=plane.blocks_high,
            blocks=plane.blocks.astype(np.float64) * grid,
            state="dequantized", quant_table_id=plane.quant_table_id)
    return result


def render_plane(plane):
    """One dequantized plane -> 8-bit grayscale, blocks kept in place.

    Sample map: clamp(round(c / 8) + 128, 0, 255); the DC sample of each
    block then equals the block's mean intensity.
    """
    if plane.state != "dequantized":
        raise ValueError("rendering requires dequantized planes")
    scaled = np.clip(round_half_away(plane.blocks / 8.0) + 128, 0, 255)
    img = scaled.transpose(0, 2, 1, 3).reshape(plane.padded_height, plane.padded_width)
    return img.astype(np.uint8)


def render_dct_image(planes):
    """Render planes to an image: (h, w, 3) when dims agree, else (h, w) luma."""
    rendered = {ident: render_plane(p) for ident, p in planes.items()}
    images = list(rendered.values())
    if len(images) == 3 and len({im.shape for im in images}) == 1:
        idents = sorted(rendered)
        return np.stack([rendered[i] for i in idents], axis=2)
    first = sorted(rendered)[0]
    return rendered[first]


def to_channelized_tensor(planes):
    """Dequantized planes -> {ident: (blocks_high, blocks_wide, 64) float32}.

    Channel k is zigzag position k of each block.
    """
    tensors = {}
    for ident, plane in planes.items():
        if plane.state != "dequantized":
            raise ValueError("tensor layout requires dequantized planes")
        natural = plane.blocks.reshape(plane.blocks_high, plane.blocks_wide, 64)
        tensors[ident] = natural[:, :, ZIGZAG_INDEX].astype(np.float32)
    return tensors


def partial_decode(data):
    """Bytes -> dequantized coefficient planes; never touches the IDCT."""
    stream = parse_stream(data)
    planes = extract_coefficients(stream)
    return dequantize_planes(planes, stream.quant_tables)
