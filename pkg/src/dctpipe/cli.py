"""Command-line surface: encode, decode, extract-dct, build-dataset, train,
evaluate, bench.

Exit codes: 0 success, 2 I/O error, 3 usage error, 4 unsupported input.
"""

import argparse
import json
import logging
import os
import struct
import sys
from pathlib import Path

import numpy as np

EXIT_IO = 2
EXIT_USAGE = 3
EXIT_UNSUPPORTED = 4

log = logging.getLogger("dctpipe")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_input_image(path):
    from PIL import Image

    from .codec import decode_jpeg

    path = Path(path)
    if path.suffix.lower() in (".jpg", ".jpeg"):
        return decode_jpeg(path.read_bytes())
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def cmd_encode(args):
    from .codec import encode_jpeg

    if not 1 <= args.quality <= 100:
        raise UsageError("--quality must be in [1, 100]")
    if args.subsampling not in ("4:4:4", "4:2:0"):
        raise UsageError("--subsampling must be 4:4:4 or 4:2:0")
    rgb = _load_input_image(args.input)
    Path(args.output).write_bytes(
        encode_jpeg(rgb, quality=args.quality, subsampling=args.subsampling))
    return 0


def cmd_decode(args):
    from PIL import Image

    from .codec import decode_jpeg

    rgb = decode_jpeg(Path(args.input).read_bytes())
    Image.fromarray(rgb).save(args.output)
    return 0


def cmd_extract_dct(args):
    from PIL import Image

    from .partial import partial_decode, render_dct_image, to_channelized_tensor

    if args.render == args.tensor:
        raise UsageError("exactly one of --render / --tensor is required")
    planes = partial_decode(Path(args.input).read_bytes())
    if args.render:
        Image.fromarray(render_dct_image(planes)).save(args.output)
    else:
        tensors = to_channelized_tensor(planes)
        stacked = np.stack([tensors[i] for i in sorted(tensors)], axis=0)
        with open(args.output, "wb") as fh:
            fh.write(b"DCTT" + struct.pack("<I", stacked.ndim))
            fh.write(struct.pack(f"<{stacked.ndim}I", *stacked.shape))
            fh.write(stacked.astype("<f4").tobytes())
    return 0


def cmd_build_dataset(args):
    from .dataset import build_dataset

    ratios = tuple(float(r) for r in args.split.split("/"))
    if len(ratios) != 3:
        raise UsageError("--split must be train/val/test, e.g. 0.8/0.1/0.1")
    build_dataset(args.root, args.output, representation=args.representation,
                  quality=args.quality, subsampling=args.subsampling,
                  target_size=args.size, ratios=ratios, seed=args.seed)
    return 0


def cmd_train(args):
    from .classifier import TrainConfig, train
    from .dataset import load_split_matrix

    manifest, labels, features = load_split_matrix(args.dataset)
    config = TrainConfig(learning_rate=args.lr, batch_size=args.batch,
                         epochs=args.epochs, seed=args.seed, l2=args.l2)
    model, history = train(features, labels, len(manifest.classes), config)
    model.save(args.output)
    history_path = args.history or str(Path(args.output).with_suffix(".history.json"))
    Path(history_path).write_text(json.dumps(history, sort_keys=True))
    return 0


def cmd_evaluate(args):
    from .classifier import SoftmaxModel, predict_topk
    from .dataset import load_split_matrix
    from .metrics import (confusion, format_report, precision_recall_f1,
                          report_json_text, topk_accuracy)

    model = SoftmaxModel.load(args.model)
    manifest, labels, features = load_split_matrix(args.dataset)
    k = args.topk
    rankings = [predict_topk(model, x, k) for x in features]
    preds = [r[0][0] for r in rankings]
    cm = confusion(preds, labels, len(manifest.classes))
    report = precision_recall_f1(cm, manifest.classes)
    report.topk_accuracies[k] = topk_accuracy(rankings, labels, k)
    text = report_json_text(report) if args.format == "json" else format_report(report)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text)
    return 0


def cmd_bench(args):
    from .bench import bench_decode_paths, bench_kernels

    result = bench_decode_paths(args.corpus, repeats=args.repeats)
    if args.kernels:
        result["kernels"] = bench_kernels()
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text)
    return 0


def build_parser():
    parser = _Parser(prog="dctpipe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode an image to baseline JPEG")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--quality", type=int, default=90)
    p.add_argument("--subsampling", default="4:4:4")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="decode a baseline JPEG to PNG/BMP")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("extract-dct", help="partial-decode to DCT rendering or tensor")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--render", action="store_true")
    p.add_argument("--tensor", action="store_true")
    p.set_defaults(fn=cmd_extract_dct)

    p = sub.add_parser("build-dataset", help="build DCTD dataset files from a class tree")
    p.add_argument("root")
    p.add_argument("output")
    p.add_argument("--representation", choices=("pixel", "dct-image", "dct-tensor"),
                   default="dct-tensor")
    p.add_argument("--quality", type=int, default=90)
    p.add_argument("--subsampling", default="4:4:4")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--split", default="0.8/0.1/0.1")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(fn=cmd_build_dataset)

    p = sub.add_parser("train", help="train the softmax classifier on a DCTD split")
    p.add_argument("dataset")
    p.add_argument("output")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--history")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a model on a DCTD split")
    p.add_argument("model")
    p.add_argument("dataset")
    p.add_argument("--topk", type=int, default=3)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("bench", help="time partial vs full decode over a corpus")
    p.add_argument("corpus")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--kernels", action="store_true",
                   help="also compare numba vs numpy kernel backends")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("DCTPIPE_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:
        from .stream import JpegFormatError, UnsupportedModeError

        if isinstance(exc, UnsupportedModeError):
            print(f"unsupported input: {exc}", file=sys.stderr)
            return EXIT_UNSUPPORTED
        if isinstance(exc, JpegFormatError):
            print(f"invalid input: {exc}", file=sys.stderr)
            return EXIT_UNSUPPORTED
        raise


if __name__ == "__main__":
    sys.exit(main())
