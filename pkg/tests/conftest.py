import io

import numpy as np
import pytest
from PIL import Image
from scipy.ndimage import gaussian_filter


def smooth_image(rng, height, width, sigma=3.0):
    """Random low-pass image; natural-ish content for codec tests."""
    base = rng.random((height, width, 3)) * 255.0
    return np.clip(gaussian_filter(base, sigma=(sigma, sigma, 0)), 0, 255).astype(np.uint8)


def pil_jpeg_bytes(rgb, quality=85, subsampling=0, **kwargs):
    """Encode with Pillow/libjpeg: the independent reference encoder."""
    buf = io.BytesIO()
    Image.fromarray(rgb).save(buf, format="JPEG", quality=quality,
                              subsampling=subsampling, **kwargs)
    return buf.getvalue()


def pil_decode_rgb(data):
    return np.asarray(Image.open(io.BytesIO(data)).convert("RGB"))


def pil_decode_ycbcr(data):
    """Reference decode stopped at YCbCr (no libjpeg color conversion)."""
    im = Image.open(io.BytesIO(data))
    im.draft("YCbCr", im.size)
    arr = np.asarray(im)
    assert im.mode == "YCbCr"
    return arr


@pytest.fixture(scope="session")
def interop_corpus(tmp_path_factory):
    """>= 20 externally produced baseline JPEGs, tagged by content kind.

    Kinds: "color444", "color420", "gray3" (gray content, 3 components),
    "grayscale" (true 1-component).
    """
    root = tmp_path_factory.mktemp("interop")
    rng = np.random.default_rng(2024)
    entries = []

    def save(name, data, kind):
        path = root / name
        path.write_bytes(data)
        entries.append((path, kind))

    for i in range(8):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        img = smooth_image(rng, h, w)
        q = int(rng.integers(50, 96))
        save(f"color444_{i}.jpg", pil_jpeg_bytes(img, quality=q, subsampling=0),
             "color444")
    for i in range(4):
        h, w = (int(x) for x in rng.integers(32, 96, 2))
        img = smooth_image(rng, h, w, sigma=5.0)
        save(f"color420_{i}.jpg", pil_jpeg_bytes(img, quality=85, subsampling=2),
             "color420")
    for i in range(6):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        gray = smooth_image(rng, h, w)[:, :, :1]
        img = np.repeat(gray, 3, axis=2)
        sub = 0 if i % 2 == 0 else 2
        q = int(rng.integers(50, 96))
        save(f"gray3_{i}.jpg", pil_jpeg_bytes(img, quality=q, subsampling=sub),
             "gray3")
    for i in range(4):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        gray = smooth_image(rng, h, w)[:, :, 0]
        buf = io.BytesIO()
        Image.fromarray(gray, mode="L").save(buf, format="JPEG",
                                             quality=int(rng.integers(50, 96)))
        save(f"grayscale_{i}.jpg", buf.getvalue(), "grayscale")
    assert len(entries) >= 20
    return entries


def make_class_tree(root, classes, files_per_class, size=40, seed=0):
    """Tiny synthetic corpus: one directory per class, PNG files."""
    rng = np.random.default_rng(seed)
    for name in classes:
        d = root / name
        d.mkdir(parents=True)
        for i in range(files_per_class):
            img = smooth_image(rng, size, size)
            Image.fromarray(img).save(d / f"img_{i:03d}.png")
    return root
