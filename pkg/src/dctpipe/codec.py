"""Full baseline JPEG encode/decode assembled from the codec primitives."""

import math
import struct

import numpy as np

from . import dct, huffman
from .color import YcbcrImage, rgb_to_ycbcr, ycbcr_to_rgb
from .kernels import round_half_away
from .partial import (CoefficientPlane, dequantize_planes, extract_coefficients)
from .quant import quality_to_quant_tables
from .rle import rle_encode
from .stream import parse_stream
from .zigzag import ZIGZAG_INDEX


def _pad_plane(plane, width_blocks, height_blocks):
    """Edge-replicate a sample plane out to a full block grid."""
    th, tw = height_blocks * 8, width_blocks * 8
    h, w = plane.shape
    return np.pad(plane, ((0, th - h), (0, tw - w)), mode="edge")


def _plane_to_quantized(plane, bw, bh, table):
    """Sample plane -> (bh, bw, 64) zigzag quantized int32."""
    padded = _pad_plane(plane, bw, bh).astype(np.float64) - 128.0
    blocks = (padded.reshape(bh, 8, bw, 8).transpose(0, 2, 1, 3)
              .reshape(bh * bw, 8, 8))
    coeffs = dct.forward_dct_blocks(blocks)
    ratios = coeffs / table.grid
    flat = round_half_away(ratios).reshape(bh * bw, 64)
    return flat[:, ZIGZAG_INDEX].astype(np.int32).reshape(bh, bw, 64)


def _segment(marker, payload):
    return bytes([0xFF, marker]) + struct.pack(">H", len(payload) + 2) + payload


def _app0_jfif():
    return _segment(0xE0, b"JFIF\x00" + bytes([1, 1, 0]) + struct.pack(">HH", 1, 1) + b"\x00\x00")


def _dqt_segment(luma, chroma):
    payload = bytes([0x00]) + bytes(int(v) for v in luma.divisors)
    payload += bytes([0x01]) + bytes(int(v) for v in chroma.divisors)
    return _segment(0xDB, payload)


def _sof0_segment(width, height, sampling):
    body = bytes([8]) + struct.pack(">HH", height, width) + bytes([3])
    for ident, (h, v), tq in ((1, sampling[0], 0), (2, sampling[1], 1), (3, sampling[2], 1)):
        body += bytes([ident, (h << 4) | v, tq])
    return _segment(0xC0, body)


def _dht_segment():
    payload = b""
    for tc, th, table in ((0, 0, huffman.STD_DC_LUMA), (1, 0, huffman.STD_AC_LUMA),
                          (0, 1, huffman.STD_DC_CHROMA), (1, 1, huffman.STD_AC_CHROMA)):
        payload += bytes([(tc << 4) | th]) + bytes(table.bits) + bytes(table.values)
    return _segment(0xC4, payload)


def _sos_segment():
    body = bytes([3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0])
    return _segment(0xDA, body)


def encode_jpeg_with_planes(rgb, quality=90, subsampling="4:4:4"):
    """Encode and also return the internal quantized coefficient planes."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("expected (h, w, 3) uint8 RGB array")
    height, width = rgb.shape[:2]
    if width < 1 or height < 1:
        raise ValueError("empty image")
    luma_qt, chroma_qt = quality_to_quant_tables(quality)
    ycc = rgb_to_ycbcr(rgb, subsampling)

    if subsampling == "4:2:0":
        sampling = ((2, 2), (1, 1), (1, 1))
    else:
        sampling = ((1, 1), (1, 1), (1, 1))
    hmax = max(h for h, _ in sampling)
    vmax = max(v for _, v in sampling)
    mcus_x = math.ceil(width / (8 * hmax))
    mcus_y = math.ceil(height / (8 * vmax))

    planes = {}
    quantized = {}
    for ident, plane, (h, v), table in ((1, ycc.y, sampling[0], luma_qt),
                                        (2, ycc.cb, sampling[1], chroma_qt),
                                        (3, ycc.cr, sampling[2], chroma_qt)):
        bw, bh = mcus_x * h, mcus_y * v
        q = _plane_to_quantized(plane, bw, bh, table)
        quantized[ident] = q
        natural = np.empty_like(q)
        natural[:, :, ZIGZAG_INDEX] = q
        planes[ident] = CoefficientPlane(
            component_id=ident, blocks_wide=bw, blocks_high=bh,
            blocks=natural.reshape(bh, bw, 8, 8), state="quantized",
            quant_table_id=0 if ident == 1 else 1)

    writer = huffman.BitWriter()
    predictors = {1: 0, 2: 0, 3: 0}
    tables = {1: (huffman.STD_DC_LUMA, huffman.STD_AC_LUMA),
              2: (huffman.STD_DC_CHROMA, huffman.STD_AC_CHROMA),
              3: (huffman.STD_DC_CHROMA, huffman.STD_AC_CHROMA)}
    for my in range(mcus_y):
        for mx in range(mcus_x):
            for ident, (h, v) in zip((1, 2, 3), sampling):
                dc_table, ac_table = tables[ident]
                for by in range(v):
                    for bx in range(h):
                        block = quantized[ident][my * v + by, mx * h + bx]
                        dc = int(block[0])
                        diff = dc - predictors[ident]
                        predictors[ident] = dc
                        huffman.encode_block(writer, diff, rle_encode(block[1:]),
                                             dc_table, ac_table)
    scan = writer.flush()

    out = bytearray(b"\xff\xd8")
    out += _app0_jfif()
    out += _dqt_segment(luma_qt, chroma_qt)
    out += _sof0_segment(width, height, sampling)
    out += _dht_segment()
    out += _sos_segment()
    out += scan
    out += b"\xff\xd9"
    return bytes(out), planes


def encode_jpeg(rgb, quality=90, subsampling="4:4:4"):
    """Encode (h, w, 3) uint8 RGB into baseline sequential JFIF bytes."""
    data, _ = encode_jpeg_with_planes(rgb, quality, subsampling)
    return data


def decode_jpeg(data):
    """Baseline JFIF bytes -> (h, w, 3) uint8 RGB."""
    stream = parse_stream(data)
    quantized = extract_coefficients(stream)
    dequantized = dequantize_planes(quantized, stream.quant_tables)

    hmax, vmax = stream.max_h, stream.max_v
    sample_planes = {}
    for comp in stream.components:
        plane = dequantized[comp.ident]
        bh, bw = plane.blocks_high, plane.blocks_wide
        samples = dct.inverse_dct_blocks(plane.blocks.reshape(bh * bw, 8, 8))
        samples = np.clip(round_half_away(samples) + 128, 0, 255).astype(np.uint8)
        img = (samples.reshape(bh, bw, 8, 8).transpose(0, 2, 1, 3)
               .reshape(bh * 8, bw * 8))
        # Crop to the component's true dimensions, then bring to full resolution.
        cw = math.ceil(stream.width * comp.h / hmax)
        ch = math.ceil(stream.height * comp.v / vmax)
        img = img[:ch, :cw]
        fx, fy = hmax // comp.h, vmax // comp.v
        if fx > 1 or fy > 1:
            img = np.repeat(np.repeat(img, fy, axis=0), fx, axis=1)
            img = img[:stream.height, :stream.width]
        sample_planes[comp.ident] = img

    idents = [c.ident for c in stream.components]
    if len(idents) == 1:
        y = sample_planes[idents[0]]
        neutral = np.full_like(y, 128)
        ycc = YcbcrImage(width=stream.width, height=stream.height,
                         subsampling="4:4:4", y=y, cb=neutral, cr=neutral)
    elif len(idents) == 3:
        ycc = YcbcrImage(width=stream.width, height=stream.height,
                         subsampling="4:4:4", y=sample_planes[idents[0]],
                         cb=sample_planes[idents[1]], cr=sample_planes[idents[2]])
    else:
        raise ValueError(f"unsupported component count {len(idents)}")
    return ycbcr_to_rgb(ycc)
