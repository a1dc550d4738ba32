"""Training pipeline: leakage-safe splitting, alternating G/D optimization,
loss logging, checkpointing, and single-image translation."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .corpus import Manifest, derive_seed
from .gan import (
    DiscriminatorConfig,
    GeneratorConfig,
    LossWeights,
    PatchDiscriminator,
    UNetGenerator,
    gan_loss,
    init_weights,
    load_checkpoint,
    save_checkpoint,
)
from .gan.losses import l1_loss
from .raster import RasterImage

# keep decoded pairs in memory below this budget
_CACHE_BYTES = 600 * 1024 * 1024


class TrainingDiverged(RuntimeError):
    def __init__(self, message, checkpoint_dir=None):
        super().__init__(message)
        self.checkpoint_dir = checkpoint_dir


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 2e-4
    batch_size: int = 1
    epochs: int = 30  # base-corpus default; augmented runs typically use 50
    beta1: float = 0.5
    beta2: float = 0.999
    lambda_l1: float = 100.0
    seed: int = 0
    image_size: int = 64  # desk-scale default; 256 for full runs
    ng: int = 64
    nd: int = 64
    dropout_p: float = 0.5
    checkpoint_every: int = 0  # steps; 0 = only at end
    num_threads: int = 0  # 0 = leave torch's default

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")

    def loss_weights(self):
        return LossWeights(lambda_l1=self.lambda_l1)


@dataclass(frozen=True)
class LossRecord:
    step: int
    loss_g_adv: float
    loss_d: float
    loss_l1: float


@dataclass
class LossLog:
    records: list = field(default_factory=list)

    def append(self, step, loss_g_adv, loss_d, loss_l1):
        values = (loss_g_adv, loss_d, loss_l1)
        if not all(math.isfinite(v) for v in values):
            raise TrainingDiverged(f"non-finite loss at step {step}: {values}")
        if self.records and step <= self.records[-1].step:
            raise ValueError(f"step index must increase, got {step} after {self.records[-1].step}")
        self.records.append(LossRecord(step, *values))

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["step", "loss_g_adv", "loss_d", "loss_l1"])
            for r in self.records:
                w.writerow([r.step, repr(r.loss_g_adv), repr(r.loss_d), repr(r.loss_l1)])

    @staticmethod
    def from_csv(path):
        log = LossLog()
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            for row in reader:
                log.append(
                    int(row["step"]),
                    float(row["loss_g_adv"]),
                    float(row["loss_d"]),
                    float(row["loss_l1"]),
                )
        return log


@dataclass(frozen=True)
class SplitResult:
    train_ids: tuple
    test_ids: tuple


def split_corpus(manifest: Manifest, train_fraction: float = 0.958, seed: int = 0) -> SplitResult:
    """Deterministic train/test split that never separates augmented siblings.

    Whole base-id groups are assigned to one side; the prefix of the shuffled
    group order is chosen so the train count lands as close as possible to
    round(n * fraction) (exactly there whenever group sizes allow, in
    particular for unaugmented corpora).
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if not manifest.entries:
        raise ValueError("cannot split an empty corpus")
    base_order = []
    groups = {}
    for e in manifest.entries:
        base = e.get("base_id", e["id"])
        if base not in groups:
            groups[base] = []
            base_order.append(base)
        groups[base].append(e["id"])
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(len(base_order))
    shuffled = [base_order[i] for i in perm]

    n_total = len(manifest.entries)
    target = n_total * train_fraction
    best_prefix, best_count, best_err = 0, 0, abs(target)
    count = 0
    for i, base in enumerate(shuffled):
        count += len(groups[base])
        err = abs(count - target)
        if err < best_err or (err == best_err and count > best_count):
            best_prefix, best_count, best_err = i + 1, count, err
    train_bases = set(shuffled[:best_prefix])
    train_ids = tuple(e["id"] for e in manifest.entries if e.get("base_id", e["id"]) in train_bases)
    test_ids = tuple(e["id"] for e in manifest.entries if e.get("base_id", e["id"]) not in train_bases)
    if not test_ids:
        warnings.warn(f"test split is empty (n={n_total}, fraction={train_fraction})")
    return SplitResult(train_ids=train_ids, test_ids=test_ids)


def pair_tensors(manifest: Manifest, sample_id: str, size: int):
    """(source, target) float32 tensors in [0,1], CHW, resized to the model size."""
    pair = manifest.load_pair(sample_id)
    src = pair.source.to_rgb().resize(size, size)
    tgt = pair.target.to_rgb().resize(size, size)
    to_t = lambda im: torch.from_numpy(im.pixels.copy()).permute(2, 0, 1)
    return to_t(src), to_t(tgt)


class _PairLoader:
    def __init__(self, manifest, ids, size):
        self.manifest = manifest
        self.ids = list(ids)
        self.size = size
        need = len(self.ids) * 2 * 3 * size * size * 4
        self.cache = {} if need <= _CACHE_BYTES else None

    def __call__(self, sample_id):
        if self.cache is not None and sample_id in self.cache:
            return self.cache[sample_id]
        pair = pair_tensors(self.manifest, sample_id, self.size)
        if self.cache is not None:
            self.cache[sample_id] = pair
        return pair


@dataclass
class TrainResult:
    checkpoint_dir: Path
    loss_log: LossLog
    config: TrainConfig


def build_models(cfg: TrainConfig):
    gen = UNetGenerator(
        GeneratorConfig(ng=cfg.ng, image_size=cfg.image_size, dropout_p=cfg.dropout_p)
    )
    disc = PatchDiscriminator(DiscriminatorConfig(nd=cfg.nd))
    g = torch.Generator().manual_seed(cfg.seed)
    init_weights(gen, generator=g)
    init_weights(disc, generator=g)
    return gen, disc


def train(manifest: Manifest, cfg: TrainConfig, out_dir, train_ids=None) -> TrainResult:
    """Alternating per-step updates: D on loss_d, then G on the full objective.

    Deterministic for a fixed seed in single-threaded mode: weight init, data
    order and dropout all derive from cfg.seed. Aborts on non-finite loss,
    keeping the last scheduled checkpoint.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = list(train_ids) if train_ids is not None else list(manifest.ids)
    if not ids:
        raise ValueError("training id list is empty")
    if cfg.num_threads:
        torch.set_num_threads(cfg.num_threads)
    torch.manual_seed(cfg.seed)

    gen, disc = build_models(cfg)
    gen.train()
    disc.train()
    gen.set_noise(True)  # dropout is the noise source; global RNG during training
    opt_g = torch.optim.Adam(gen.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
    weights = cfg.loss_weights()

    loader = _PairLoader(manifest, ids, cfg.image_size)
    ckpt_dir = out / "ckpt"
    log = LossLog()
    step = 0
    wrote_checkpoint = False

    def save(step_now):
        nonlocal wrote_checkpoint
        save_checkpoint(
            ckpt_dir, gen, disc, step=step_now, seed=cfg.seed,
            extra={"lr": cfg.lr, "epochs": cfg.epochs, "lambda_l1": cfg.lambda_l1},
        )
        wrote_checkpoint = True

    try:
        for epoch in range(cfg.epochs):
            order_rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, epoch)))
            order = order_rng.permutation(len(ids))
            for start in range(0, len(order), cfg.batch_size):
                batch_ids = [ids[i] for i in order[start : start + cfg.batch_size]]
                pairs = [loader(sid) for sid in batch_ids]
                src = torch.stack([p[0] for p in pairs])
                tgt = torch.stack([p[1] for p in pairs])

                fake = gen(src)

                opt_d.zero_grad()
                d_real = disc(src, tgt)
                d_fake = disc(src, fake.detach())
                loss_d, _ = gan_loss(d_real, d_fake)
                loss_d.backward()
                opt_d.step()

                opt_g.zero_grad()
                d_fake_for_g = disc(src, fake)
                _, adv = gan_loss(d_real.detach(), d_fake_for_g)
                recon = l1_loss(fake, tgt)
                loss_g = adv + weights.lambda_l1 * recon
                loss_g.backward()
                opt_g.step()

                step += 1
                log.append(step, float(adv.detach()), float(loss_d.detach()), float(recon.detach()))
                if cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                    save(step)
    except TrainingDiverged as e:
        log.to_csv(out / "losses.csv")
        raise TrainingDiverged(
            f"{e}; last-good checkpoint {'kept at ' + str(ckpt_dir) if wrote_checkpoint else 'not yet written'}",
            checkpoint_dir=ckpt_dir if wrote_checkpoint else None,
        ) from e

    save(step)
    log.to_csv(out / "losses.csv")
    return TrainResult(checkpoint_dir=ckpt_dir, loss_log=log, config=cfg)


def letterbox(img: RasterImage, size: int) -> RasterImage:
    """Resize preserving aspect, padding with white to a size x size square."""
    if img.width == img.height:
        return img.resize(size, size)
    scale = size / max(img.width, img.height)
    nw = max(1, int(round(img.width * scale)))
    nh = max(1, int(round(img.height * scale)))
    resized = img.to_rgb().resize(nw, nh)
    canvas = np.ones((size, size, 3), dtype=np.float32)
    x0 = (size - nw) // 2
    y0 = (size - nh) // 2
    canvas[y0 : y0 + nh, x0 : x0 + nw] = resized.pixels
    return RasterImage(canvas)


def translate(ckpt, source: RasterImage, dropout_seed: int = 0, noise: bool = True) -> RasterImage:
    """Run the generator on one source image; deterministic given the seed.

    ``ckpt`` is a checkpoint directory or an already-loaded UNetGenerator.
    """
    if isinstance(ckpt, UNetGenerator):
        gen = ckpt
    else:
        gen, _, _ = load_checkpoint(ckpt)
    gen.eval()
    size = gen.cfg.image_size
    prepared = letterbox(source.to_rgb(), size)
    x = torch.from_numpy(prepared.pixels.copy()).permute(2, 0, 1).unsqueeze(0)
    gen.set_noise(noise, torch.Generator().manual_seed(dropout_seed) if noise else None)
    with torch.no_grad():
        y = gen(x)
    gen.set_noise(True, None)
    arr = y[0].permute(1, 2, 0).clamp(0.0, 1.0).numpy().astype(np.float32)
    return RasterImage(arr)
