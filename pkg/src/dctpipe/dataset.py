"""Corpus scanning, deterministic splits, and the DCTD dataset format.

Layout of a dataset file:

    magic "DCTD" | u32 version | u32 manifest length | manifest JSON (UTF-8)
    then per record:
    u32 label | u32 rank | u32 dims... | raw little-endian payload

Payload scalars are uint8 for the pixel and dct-image representations and
float32 for dct-tensor.  All integers little-endian.
"""

import hashlib
import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .codec import decode_jpeg, encode_jpeg
from .partial import partial_decode, render_dct_image, to_channelized_tensor

MAGIC = b"DCTD"
FORMAT_VERSION = 1
REPRESENTATIONS = ("pixel", "dct-image", "dct-tensor")
_IMAGE_SUFFIXES = (".png", ".bmp", ".jpg", ".jpeg")


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ClassLabel:
    crop: str
    disease: str
    index: int

    @property
    def name(self):
        return f"{self.disease}({self.crop})" if self.crop else self.disease


@dataclass
class DatasetManifest:
    classes: list                 # index -> class name
    representation: str
    quality: int
    subsampling: str
    target_size: int
    split_ratios: tuple
    split_seed: int
    split_counts: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def to_json(self):
        return json.dumps({
            "classes": list(self.classes),
            "representation": self.representation,
            "quality": self.quality,
            "subsampling": self.subsampling,
            "target_size": self.target_size,
            "split_ratios": list(self.split_ratios),
            "split_seed": self.split_seed,
            "split_counts": self.split_counts,
            "version": self.version,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(classes=d["classes"], representation=d["representation"],
                   quality=d["quality"], subsampling=d["subsampling"],
                   target_size=d["target_size"],
                   split_ratios=tuple(d["split_ratios"]),
                   split_seed=d["split_seed"],
                   split_counts=d.get("split_counts", {}),
                   version=d.get("version", FORMAT_VERSION))


def parse_class_name(name):
    """'Scab(Apple)' -> ('Apple', 'Scab'); bare names keep an empty crop."""
    if name.endswith(")") and "(" in name:
        disease, crop = name[:-1].split("(", 1)
        return crop.strip(), disease.strip()
    return "", name


def scan_corpus(root):
    """Directory-per-class tree -> (labels, [(path, label_index), ...])."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root {root} does not exist")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise ValueError("no classes")
    labels = []
    files = []
    for index, class_dir in enumerate(class_dirs):
        crop, disease = parse_class_name(class_dir.name)
        labels.append(ClassLabel(crop=crop, disease=disease, index=index))
        entries = sorted(p for p in class_dir.rglob("*")
                         if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES)
        if not entries:
            warnings.warn(f"class {class_dir.name!r} has no image files")
        files.extend((p, index) for p in entries)
    return labels, files


def split(files, ratios, seed):
    """Stratified per-class split, deterministic given the seed."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must be three non-negative values summing to 1")
    by_class = {}
    for path, label in files:
        by_class.setdefault(label, []).append((path, label))
    rng = np.random.default_rng(seed)
    train, val, test = [], [], []
    for label in sorted(by_class):
        entries = by_class[label]
        order = rng.permutation(len(entries))
        n = len(entries)
        n_val = int(round(ratios[1] * n))
        n_test = int(round(ratios[2] * n))
        if n_val + n_test >= n and n > 0:
            if n < 3 and (ratios[1] > 0 or ratios[2] > 0):
                warnings.warn(f"class {label} too small to split; all in train")
                train.extend(entries)
                continue
            n_val = min(n_val, n - 1)
            n_test = min(n_test, n - 1 - n_val)
        shuffled = [entries[i] for i in order]
        test.extend(shuffled[:n_test])
        val.extend(shuffled[n_test:n_test + n_val])
        train.extend(shuffled[n_test + n_val:])
    return train, val, test


def _load_rgb(path):
    path = Path(path)
    if path.suffix.lower() in (".jpg", ".jpeg"):
        return decode_jpeg(path.read_bytes())
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def _resize_bilinear(rgb, size):
    with Image.fromarray(rgb) as im:
        return np.asarray(im.resize((size, size), Image.BILINEAR))


def _record_tensor(rgb, manifest):
    """One source image -> the record array for the configured representation."""
    resized = _resize_bilinear(rgb, manifest.target_size)
    data = encode_jpeg(resized, quality=manifest.quality,
                       subsampling=manifest.subsampling)
    if manifest.representation == "pixel":
        return decode_jpeg(data)
    planes = partial_decode(data)
    if manifest.representation == "dct-image":
        return render_dct_image(planes)
    tensors = to_channelized_tensor(planes)
    return np.stack([tensors[i] for i in sorted(tensors)], axis=0)


def _write_record(fh, label, tensor):
    fh.write(struct.pack("<II", label, tensor.ndim))
    fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
    if tensor.dtype == np.uint8:
        fh.write(tensor.tobytes())
    else:
        fh.write(tensor.astype("<f4").tobytes())


def build_dataset(root, out_dir, representation="dct-tensor", quality=90,
                  subsampling="4:4:4", target_size=256, ratios=(0.8, 0.1, 0.1),
                  seed=0):
    """Build train/val/test DCTD files plus manifest and rejects report."""
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")
    if target_size % 32:
        raise ValueError("target size must be a multiple of 32")
    labels, files = scan_corpus(root)
    manifest = DatasetManifest(
        classes=[lab.name for lab in labels], representation=representation,
        quality=quality, subsampling=subsampling, target_size=target_size,
        split_ratios=tuple(ratios), split_seed=seed)

    splits = dict(zip(("train", "val", "test"), split(files, ratios, seed)))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rejects = []
    total = 0
    for name, entries in splits.items():
        written = 0
        with open(out_dir / f"{name}.dctd", "wb") as fh:
            header = manifest.to_json().encode()
            fh.write(MAGIC + struct.pack("<II", FORMAT_VERSION, len(header)) + header)
            for path, label in entries:
                total += 1
                try:
                    tensor = _record_tensor(_load_rgb(path), manifest)
                except Exception as exc:
                    rejects.append({"path": str(path), "error": str(exc)})
                    continue
                _write_record(fh, label, tensor)
                written += 1
        manifest.split_counts[name] = written
    if total and len(rejects) > 0.1 * total:
        raise RuntimeError(f"{len(rejects)} of {total} source files rejected")

    # Rewrite headers now that split counts are known.
    header = manifest.to_json().encode()
    for name in splits:
        path = out_dir / f"{name}.dctd"
        body = path.read_bytes()
        old_len = struct.unpack("<I", body[8:12])[0]
        path.write_bytes(MAGIC + struct.pack("<II", FORMAT_VERSION, len(header))
                         + header + body[12 + old_len:])
    (out_dir / "manifest.json").write_text(manifest.to_json())
    (out_dir / "rejects.json").write_text(json.dumps(rejects, sort_keys=True))
    return manifest


def read_dataset(path):
    """DCTD file -> (manifest, iterator of (label, tensor))."""
    path = Path(path)
    data = path.read_bytes()
    if data[:4] != MAGIC:
        raise DatasetFormatError("not a dataset file")
    version, header_len = struct.unpack("<II", data[4:12])
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported dataset version {version}")
    if len(data) < 12 + header_len:
        raise DatasetFormatError("truncated manifest")
    manifest = DatasetManifest.from_json(data[12:12 + header_len].decode())
    dtype = np.uint8 if manifest.representation in ("pixel", "dct-image") else np.dtype("<f4")

    def records():
        off = 12 + header_len
        n = 0
        while off < len(data):
            if off + 8 > len(data):
                raise DatasetFormatError(f"truncated record {n}")
            label, rank = struct.unpack("<II", data[off:off + 8])
            off += 8
            if off + 4 * rank > len(data):
                raise DatasetFormatError(f"truncated record {n}")
            shape = struct.unpack(f"<{rank}I", data[off:off + 4 * rank])
            off += 4 * rank
            nbytes = int(np.prod(shape)) * np.dtype(dtype).itemsize
            if off + nbytes > len(data):
                raise DatasetFormatError(f"truncated record {n}")
            if label >= len(manifest.classes):
                raise DatasetFormatError(f"record {n}: label out of range")
            tensor = np.frombuffer(data[off:off + nbytes], dtype=dtype).reshape(shape)
            off += nbytes
            yield int(label), tensor
            n += 1

    return manifest, records()


def load_split_matrix(path):
    """Read a DCTD file into (labels (n,), features (n, d) float64)."""
    manifest, records = read_dataset(path)
    labels = []
    feats = []
    for label, tensor in records:
        labels.append(label)
        feats.append(tensor.reshape(-1).astype(np.float64))
    if not feats:
        return manifest, np.empty(0, dtype=np.int64), np.empty((0, 0))
    return manifest, np.array(labels, dtype=np.int64), np.stack(feats)
