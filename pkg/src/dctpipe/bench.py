"""Timing harnesses: partial vs full decode, and numba vs numpy kernels."""

import time
from pathlib import Path

import numpy as np

from . import kernels
from .codec import decode_jpeg
from .partial import partial_decode


def _time_all(fn, payloads, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for data in payloads:
            fn(data)
        times.append(time.perf_counter() - start)
    return times


def bench_decode_paths(corpus_dir, repeats=3):
    """Compare mean wall time of partial_decode vs decode_jpeg over a corpus."""
    paths = sorted(Path(corpus_dir).glob("*.jpg")) + sorted(Path(corpus_dir).glob("*.jpeg"))
    if not paths:
        raise FileNotFoundError(f"no JPEG files under {corpus_dir}")
    payloads = [p.read_bytes() for p in paths]
    # Warm up both paths (JIT compilation, caches).
    partial_decode(payloads[0])
    decode_jpeg(payloads[0])
    partial_times = _time_all(partial_decode, payloads, repeats)
    full_times = _time_all(decode_jpeg, payloads, repeats)
    partial_mean = float(np.mean(partial_times)) / len(payloads)
    full_mean = float(np.mean(full_times)) / len(payloads)
    return {
        "files": len(payloads),
        "repeats": repeats,
        "partial_mean_s": partial_mean,
        "full_mean_s": full_mean,
        "speedup": full_mean / partial_mean if partial_mean else float("inf"),
        "partial_run_times_s": partial_times,
        "full_run_times_s": full_times,
    }


def bench_kernels(n_blocks=20000, repeats=5):
    """Compare the numba and numpy builds of the hot kernels."""
    rng = np.random.default_rng(0)
    blocks = rng.uniform(-128, 127, (n_blocks, 8, 8))
    pixels = rng.uniform(0, 255, (512, 512, 3))
    results = {"numba_available": kernels.NUMBA_AVAILABLE}
    pairs = [
        ("dct_blocks", kernels.dct_blocks_numpy, kernels.dct_blocks_numba, blocks),
        ("idct_blocks", kernels.idct_blocks_numpy, kernels.idct_blocks_numba, blocks),
        ("rgb_to_ycbcr", kernels.rgb_to_ycbcr_numpy, kernels.rgb_to_ycbcr_numba, pixels),
        ("ycbcr_to_rgb", kernels.ycbcr_to_rgb_numpy, kernels.ycbcr_to_rgb_numba, pixels),
    ]
    for name, numpy_fn, numba_fn, arg in pairs:
        entry = {}
        for label, fn in (("numpy", numpy_fn), ("numba", numba_fn)):
            if label == "numba" and not kernels.NUMBA_AVAILABLE:
                continue
            fn(arg)  # warm-up / compile
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                fn(arg)
                times.append(time.perf_counter() - start)
            entry[label] = float(np.min(times))
        results[name] = entry
    return results
