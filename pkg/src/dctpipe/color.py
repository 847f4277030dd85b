"""Full-range BT.601 color transforms and chroma subsampling (JFIF)."""

from dataclasses import dataclass

import numpy as np

from .kernels import rgb_to_ycbcr_mat, round_half_away, ycbcr_to_rgb_mat

SUBSAMPLING_MODES = ("4:4:4", "4:2:0")


@dataclass
class YcbcrImage:
    width: int
    height: int
    subsampling: str
    y: np.ndarray   # (height, width) uint8
    cb: np.ndarray  # full or half resolution uint8
    cr: np.ndarray

    def __post_init__(self):
        if self.subsampling not in SUBSAMPLING_MODES:
            raise ValueError(f"unknown subsampling mode {self.subsampling!r}")


def _clamp_u8(arr):
    return np.clip(round_half_away(arr), 0, 255).astype(np.uint8)


def _subsample_420(plane):
    """Average 2x2 neighborhoods; odd edges are replicated first."""
    h, w = plane.shape
    if h % 2:
        plane = np.vstack([plane, plane[-1:]])
    if w % 2:
        plane = np.hstack([plane, plane[:, -1:]])
    h, w = plane.shape
    return plane.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def rgb_to_ycbcr(rgb, subsampling="4:4:4"):
    """(h, w, 3) uint8 RGB -> YcbcrImage, chroma averaged 2x2 for 4:2:0."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected (h, w, 3) RGB array")
    if subsampling not in SUBSAMPLING_MODES:
        raise ValueError(f"unknown subsampling mode {subsampling!r}")
    h, w = rgb.shape[:2]
    ycc = rgb_to_ycbcr_mat(rgb.astype(np.float64))
    y = _clamp_u8(ycc[:, :, 0])
    if subsampling == "4:2:0":
        cb = _clamp_u8(_subsample_420(ycc[:, :, 1]))
        cr = _clamp_u8(_subsample_420(ycc[:, :, 2]))
    else:
        cb = _clamp_u8(ycc[:, :, 1])
        cr = _clamp_u8(ycc[:, :, 2])
    return YcbcrImage(width=w, height=h, subsampling=subsampling, y=y, cb=cb, cr=cr)


def upsample_plane(plane, width, height):
    """Nearest-neighbor 2x upsample of a half-resolution chroma plane."""
    up = np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)
    return up[:height, :width]


def ycbcr_to_rgb(img):
    """Inverse transform with clamping; chroma replicated 2x for 4:2:0."""
    if img.subsampling == "4:2:0":
        cb = upsample_plane(img.cb, img.width, img.height)
        cr = upsample_plane(img.cr, img.width, img.height)
    else:
        cb, cr = img.cb, img.cr
    ycc = np.stack(
        [img.y.astype(np.float64), cb.astype(np.float64), cr.astype(np.float64)],
        axis=2,
    )
    return _clamp_u8(ycbcr_to_rgb_mat(ycc))
