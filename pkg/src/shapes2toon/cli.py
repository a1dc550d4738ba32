"""Command-line interface for every pipeline stage.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. The env var
SHAPES2TOON_CKPT supplies the checkpoint path when --ckpt is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapes2toon", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sd = sub.add_parser("synth-data", help="build a synthetic paired corpus")
    sd.add_argument("--n", type=int, required=True, help="number of base pairs")
    sd.add_argument("--seed", type=int, default=0)
    sd.add_argument("--out", required=True)
    sd.add_argument("--size", type=int, default=256)

    ag = sub.add_parser("augment", help="expand a corpus with geometric variants")
    ag.add_argument("--corpus", required=True)
    ag.add_argument("--out", required=True)
    ag.add_argument("--per-base", type=int, default=15)
    ag.add_argument("--seed", type=int, default=0)
    ag.add_argument("--rotate-max", type=float, default=25.0)
    ag.add_argument("--scale-min", type=float, default=0.8)
    ag.add_argument("--scale-max", type=float, default=1.2)
    ag.add_argument("--translate-max", type=float, default=0.1)
    ag.add_argument("--no-flip", action="store_true")

    ft = sub.add_parser("fit", help="approximate a toon image with circles/ovals")
    ft.add_argument("--image", required=True)
    ft.add_argument("--out", required=True, help="layout document path")
    ft.add_argument("--r-min", type=float)
    ft.add_argument("--r-max", type=float)
    ft.add_argument("--vote-threshold", type=float)

    tr = sub.add_parser("train", help="train the translation model on a corpus")
    tr.add_argument("--corpus", required=True)
    tr.add_argument("--out", required=True)
    tr.add_argument("--epochs", type=int, default=30)
    tr.add_argument("--size", type=int, default=64)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--lr", type=float, default=2e-4)
    tr.add_argument("--batch-size", type=int, default=1)
    tr.add_argument("--lambda-l1", type=float, default=100.0)
    tr.add_argument("--ng", type=int, default=64)
    tr.add_argument("--nd", type=int, default=64)
    tr.add_argument("--checkpoint-every", type=int, default=0)
    tr.add_argument("--threads", type=int, default=0)
    tr.add_argument("--train-fraction", type=float, default=0.958)
    tr.add_argument("--no-split", action="store_true", help="train on the whole corpus")

    inf = sub.add_parser("infer", help="translate one layout or image")
    inf.add_argument("--ckpt")
    inf.add_argument("--layout")
    inf.add_argument("--image")
    inf.add_argument("--out", required=True)
    inf.add_argument("--seed", type=int, default=0)

    fd = sub.add_parser("fid", help="evaluate a checkpoint on a corpus split")
    fd.add_argument("--ckpt")
    fd.add_argument("--corpus", required=True)
    fd.add_argument("--out", help="report JSON path (default: stdout)")
    fd.add_argument("--seed", type=int, default=0, help="split seed")
    fd.add_argument("--train-fraction", type=float, default=0.958)
    fd.add_argument("--extractor-seed", type=int, default=0)
    fd.add_argument("--whole-corpus", action="store_true", help="evaluate on all ids")

    sv = sub.add_parser("serve", help="run the HTTP inference service")
    sv.add_argument("--ckpt")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--collection")
    sv.add_argument("--seed-policy", choices=["fixed", "per-request"], default="fixed")
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--static")

    pl = sub.add_parser("plot-losses", help="render loss curves from a training CSV")
    pl.add_argument("--log", required=True)
    pl.add_argument("--out", required=True)

    return p


def _checkpoint_path(arg):
    ckpt = arg or os.environ.get("SHAPES2TOON_CKPT")
    if not ckpt:
        raise ValueError("no checkpoint: pass --ckpt or set SHAPES2TOON_CKPT")
    return ckpt


def _cmd_synth_data(args):
    from .corpus import build_corpus

    manifest = build_corpus(args.n, args.seed, args.out, size=args.size)
    print(f"wrote {len(manifest.entries)} pairs to {args.out}")
    return EXIT_OK


def _cmd_augment(args):
    from .augment import AugmentationPlan, expand_corpus
    from .corpus import load_manifest

    plan = AugmentationPlan(
        per_base=args.per_base,
        rotate_max_deg=args.rotate_max,
        scale_range=(args.scale_min, args.scale_max),
        translate_max_frac=args.translate_max,
        allow_flip=not args.no_flip,
        rng_seed=args.seed,
    )
    manifest = expand_corpus(load_manifest(args.corpus), plan, args.out)
    print(f"wrote {len(manifest.entries)} pairs to {args.out}")
    return EXIT_OK


def _cmd_fit(args):
    from dataclasses import replace

    from .fitting import default_circle_config, fit_layout
    from .raster import load_png
    from .shapes import serialize_layout

    img = load_png(args.image)
    cfg = default_circle_config(img)
    overrides = {}
    if args.r_min is not None:
        overrides["r_min"] = args.r_min
    if args.r_max is not None:
        overrides["r_max"] = args.r_max
    if args.vote_threshold is not None:
        overrides["vote_threshold"] = args.vote_threshold
    if overrides:
        cfg = replace(cfg, **overrides)
    layout = fit_layout(img, cfg)
    Path(args.out).write_text(serialize_layout(layout))
    print(f"fitted {len(layout.shapes)} shapes -> {args.out}")
    return EXIT_OK


def _cmd_train(args):
    from .corpus import load_manifest
    from .train import TrainConfig, split_corpus, train

    manifest = load_manifest(args.corpus)
    cfg = TrainConfig(
        lr=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        lambda_l1=args.lambda_l1,
        seed=args.seed,
        image_size=args.size,
        ng=args.ng,
        nd=args.nd,
        checkpoint_every=args.checkpoint_every,
        num_threads=args.threads,
    )
    if args.no_split:
        train_ids = None
    else:
        split = split_corpus(manifest, args.train_fraction, seed=args.seed)
        train_ids = split.train_ids
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "split.json").write_text(
            json.dumps({"train": list(split.train_ids), "test": list(split.test_ids)})
        )
    result = train(manifest, cfg, args.out, train_ids=train_ids)
    print(f"checkpoint at {result.checkpoint_dir}, {len(result.loss_log.records)} steps logged")
    return EXIT_OK


def _cmd_infer(args):
    from .raster import load_png, rasterize
    from .shapes import parse_layout
    from .train import translate
    from .gan import load_checkpoint

    if bool(args.layout) == bool(args.image):
        raise ValueError("pass exactly one of --layout or --image")
    gen, _, _ = load_checkpoint(_checkpoint_path(args.ckpt))
    if args.layout:
        layout = parse_layout(Path(args.layout).read_text())
        size = gen.cfg.image_size
        source = rasterize(layout, size, size)
    else:
        source = load_png(args.image)
    out = translate(gen, source, dropout_seed=args.seed)
    out.save_png(args.out)
    print(f"wrote {out.width}x{out.height} translation to {args.out}")
    return EXIT_OK


def _cmd_fid(args):
    from .corpus import load_manifest
    from .fid import RandomConvEmbedder, evaluate_model
    from .train import split_corpus

    manifest = load_manifest(args.corpus)
    ckpt = _checkpoint_path(args.ckpt)
    if args.whole_corpus:
        test_ids = list(manifest.ids)
    else:
        test_ids = list(split_corpus(manifest, args.train_fraction, seed=args.seed).test_ids)
        if not test_ids:
            raise ValueError("test split is empty; use --whole-corpus for tiny corpora")
    extractor = RandomConvEmbedder(seed=args.extractor_seed)
    report = evaluate_model(ckpt, manifest, test_ids, extractor)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote report to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _cmd_serve(args):
    import uvicorn

    from .service import ServiceConfig, create_app

    app = create_app(
        ServiceConfig(
            checkpoint_path=_checkpoint_path(args.ckpt),
            collection_dir=args.collection,
            seed_policy=args.seed_policy,
            fixed_seed=args.seed,
            static_dir=args.static,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _cmd_plot_losses(args):
    from .plots import plot_losses
    from .train import LossLog

    plot_losses(LossLog.from_csv(args.log), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "synth-data": _cmd_synth_data,
    "augment": _cmd_augment,
    "fit": _cmd_fit,
    "train": _cmd_train,
    "infer": _cmd_infer,
    "fid": _cmd_fid,
    "serve": _cmd_serve,
    "plot-losses": _cmd_plot_losses,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
