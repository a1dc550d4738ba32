"""Paired-sample corpus on disk: joined side-by-side PNGs plus a manifest.

Directory layout::

    <root>/pairs/{id}.png      joined 2W x H image, source left, target right
    <root>/layouts/{id}.json   layout document for the source half
    <root>/manifest.json       {"size": W, "entries": [{id, base_id, seed, sha256, ...}]}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .raster import RasterImage, load_png
from .shapes import ShapeLayout, parse_layout, serialize_layout
from .toon import DEFAULT_STYLE, ToonStyle, render_toon, sample_layout
from . import raster


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class PairedSample:
    source: RasterImage
    target: RasterImage
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s, t = self.source, self.target
        if (s.width, s.height) != (t.width, t.height):
            raise CorpusError(
                f"source {s.width}x{s.height} and target {t.width}x{t.height} must match"
            )

    def joined(self) -> RasterImage:
        """2W x H image: source on the left, target on the right."""
        s = self.source.to_rgb().pixels
        t = self.target.to_rgb().pixels
        return RasterImage(np.concatenate([s, t], axis=1))


def split_joined(img: RasterImage) -> tuple[RasterImage, RasterImage]:
    if img.width % 2 != 0:
        raise CorpusError(f"joined pair width must be even, got {img.width}")
    half = img.width // 2
    return RasterImage(img.pixels[:, :half]), RasterImage(img.pixels[:, half:])


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class Manifest:
    root: Path
    size: int
    entries: list

    @property
    def ids(self):
        return [e["id"] for e in self.entries]

    def entry(self, sample_id) -> dict:
        for e in self.entries:
            if e["id"] == sample_id:
                return e
        raise KeyError(sample_id)

    def pair_path(self, sample_id) -> Path:
        return self.root / "pairs" / f"{sample_id}.png"

    def layout_path(self, sample_id) -> Path:
        return self.root / "layouts" / f"{sample_id}.json"

    def load_pair(self, sample_id) -> PairedSample:
        src, tgt = split_joined(load_png(self.pair_path(sample_id)))
        return PairedSample(src, tgt, dict(self.entry(sample_id)))

    def load_layout(self, sample_id) -> ShapeLayout:
        return parse_layout(self.layout_path(sample_id).read_text())

    def save(self):
        doc = {"size": self.size, "entries": self.entries}
        (self.root / "manifest.json").write_text(json.dumps(doc, indent=1))


def load_manifest(root) -> Manifest:
    root = Path(root)
    path = root / "manifest.json"
    if not path.exists():
        raise CorpusError(f"no manifest.json under {root}")
    doc = json.loads(path.read_text())
    return Manifest(root=root, size=int(doc["size"]), entries=list(doc["entries"]))


def write_pair(manifest_root: Path, sample_id: str, pair: PairedSample, layout: ShapeLayout | None):
    """Write pairs/{id}.png (+ layouts/{id}.json) and return the pair checksum."""
    root = Path(manifest_root)
    (root / "pairs").mkdir(parents=True, exist_ok=True)
    pair_path = root / "pairs" / f"{sample_id}.png"
    pair_path.write_bytes(pair.joined().to_png_bytes())
    if layout is not None:
        (root / "layouts").mkdir(parents=True, exist_ok=True)
        (root / "layouts" / f"{sample_id}.json").write_text(serialize_layout(layout))
    return sha256_file(pair_path)


def derive_seed(*parts) -> int:
    """Stable per-sample seed from (corpus seed, index, ...) parts."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def build_corpus(
    n_base: int,
    seed: int,
    out_dir,
    size: int = 256,
    style: ToonStyle = DEFAULT_STYLE,
) -> Manifest:
    """Synthesize ``n_base`` paired samples (rasterized layout -> rendered toon).

    Fully reproducible: two runs with the same (n_base, seed) produce
    byte-identical files. Per-sample randomness comes from seeds derived with
    :func:`derive_seed`, so samples are independent of build order.
    """
    if n_base < 1:
        raise CorpusError(f"n_base must be >= 1, got {n_base}")
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(n_base):
        sample_id = f"b{i:05d}"
        sample_seed = derive_seed(seed, i)
        layout = sample_layout(sample_seed)
        source = raster.rasterize(layout, size, size)
        target = render_toon(layout, style, size, size)
        pair = PairedSample(source, target, {"id": sample_id})
        digest = write_pair(root, sample_id, pair, layout)
        entries.append({"id": sample_id, "base_id": sample_id, "seed": sample_seed, "sha256": digest})
    manifest = Manifest(root=root, size=size, entries=entries)
    manifest.save()
    return manifest
