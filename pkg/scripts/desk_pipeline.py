#!/usr/bin/env python3
"""Desk-scale end-to-end experiment: synthesize, augment x15, split, train, evaluate.

Mirrors the full pipeline at laptop scale (defaults: 100 bases -> 1500 pairs,
5 epochs at 64x64). Pass --full for the paper-scale settings (500 bases,
256px, 50 epochs) if you have the hardware and the patience.
"""

import argparse
import sys
from pathlib import Path

from shapes2toon.cli import main as cli


def run(args):
    out = Path(args.out)
    base = out / "base"
    aug = out / "aug"
    run_dir = out / "run"

    steps = [
        ["synth-data", "--n", str(args.n_base), "--seed", str(args.seed), "--out", str(base), "--size", str(args.size)],
        ["augment", "--corpus", str(base), "--out", str(aug), "--per-base", "15", "--seed", str(args.seed + 1)],
        [
            "train",
            "--corpus", str(aug),
            "--out", str(run_dir),
            "--epochs", str(args.epochs),
            "--size", str(args.size),
            "--seed", str(args.seed),
            "--ng", str(args.ng),
            "--nd", str(args.ng),
            "--train-fraction", "0.958",
        ],
        [
            "fid",
            "--ckpt", str(run_dir / "ckpt"),
            "--corpus", str(aug),
            "--out", str(out / "report.json"),
            "--seed", str(args.seed),
            "--train-fraction", "0.958",
        ],
        ["plot-losses", "--log", str(run_dir / "losses.csv"), "--out", str(out / "losses.png")],
    ]
    for argv in steps:
        print("+ shapes2toon", " ".join(argv))
        rc = cli(argv)
        if rc != 0:
            return rc
    print(f"report: {out / 'report.json'}")
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="desk_out")
    p.add_argument("--n-base", type=int, default=100)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--ng", type=int, default=32)
    p.add_argument("--seed", type=int, default=5)
    p.add_argument("--full", action="store_true", help="paper-scale: 500 bases, 256px, 50 epochs, ng=64")
    a = p.parse_args()
    if a.full:
        a.n_base, a.size, a.epochs, a.ng = 500, 256, 50, 64
    sys.exit(run(a))
