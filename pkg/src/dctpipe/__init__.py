"""JPEG compressed-domain feature pipeline.

Baseline JPEG codec, a partial-decode path exposing dequantized DCT
coefficient planes, dataset tooling, a softmax classifier over the
compressed-domain features, and confusion-matrix evaluation.
"""

from .codec import decode_jpeg, encode_jpeg, encode_jpeg_with_planes
from .partial import (CoefficientPlane, dequantize_planes, extract_coefficients,
                      partial_decode, render_dct_image, to_channelized_tensor)
from .quant import QuantTable, quality_to_quant_tables
from .stream import JpegFormatError, JpegStream, UnsupportedModeError, parse_stream

__all__ = [
    "CoefficientPlane",
    "JpegFormatError",
    "JpegStream",
    "QuantTable",
    "UnsupportedModeError",
    "decode_jpeg",
    "dequantize_planes",
    "encode_jpeg",
    "encode_jpeg_with_planes",
    "extract_coefficients",
    "parse_stream",
    "partial_decode",
    "quality_to_quant_tables",
    "render_dct_image",
    "to_channelized_tensor",
]

__version__ = "0.1.0"
