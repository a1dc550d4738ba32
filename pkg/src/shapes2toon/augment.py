"""Geometric augmentation of paired samples: one warp, both halves.

Expansion is image-space (bilinear resampling) so source and target always
share the exact same code path; exposed regions fill with white. Transform
translations are in pixels of the frame they apply to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import ndimage

from .corpus import Manifest, PairedSample, derive_seed, write_pair
from .raster import RasterImage
from .shapes import AffineTransform, ShapeLayout, transform_layout


class AugmentError(ValueError):
    pass


@dataclass(frozen=True)
class AugmentationPlan:
    per_base: int = 15  # variants per base, identity included
    rotate_max_deg: float = 25.0
    scale_range: tuple = (0.8, 1.2)
    translate_max_frac: float = 0.1  # of image width/height
    allow_flip: bool = True
    rng_seed: int = 0
    # re-rasterize the transformed vector layout for the source half instead
    # of warping pixels (sharp strokes, needs layouts/ alongside the pairs)
    source_from_layout: bool = False

    def __post_init__(self):
        if self.per_base < 1:
            raise AugmentError(f"per_base must be >= 1, got {self.per_base}")
        if not (0 < self.scale_range[0] <= self.scale_range[1]):
            raise AugmentError(f"bad scale range {self.scale_range}")

    def sample_transform(self, rng, w: int, h: int) -> AffineTransform:
        return AffineTransform(
            rotate_deg=float(rng.uniform(-self.rotate_max_deg, self.rotate_max_deg)),
            scale=float(rng.uniform(*self.scale_range)),
            translate_dx=float(rng.uniform(-self.translate_max_frac, self.translate_max_frac)) * w,
            translate_dy=float(rng.uniform(-self.translate_max_frac, self.translate_max_frac)) * h,
            flip_h=bool(rng.integers(0, 2)) if self.allow_flip else False,
        )


def warp_image(img: RasterImage, t: AffineTransform) -> RasterImage:
    """Apply the affine transform about the image center with bilinear sampling.

    Same geometric map as :func:`shapes.transform_layout`, acting on pixels.
    The exact identity is special-cased to a byte-identical copy.
    """
    if not t.scale > 0:
        raise AugmentError(f"degenerate transform: scale={t.scale}")
    if t.is_identity():
        return RasterImage(img.pixels.copy())
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    a = math.radians(t.rotate_deg)
    cos_a, sin_a = math.cos(a), math.sin(a)
    # forward map in (x, y): o = R S F (p - c) + c + d
    fwd = np.array(
        [
            [t.scale * cos_a, -t.scale * sin_a],
            [t.scale * sin_a, t.scale * cos_a],
        ]
    ) @ (np.array([[-1.0, 0.0], [0.0, 1.0]]) if t.flip_h else np.eye(2))
    inv = np.linalg.inv(fwd)
    # ndimage indexes (row, col) = (y, x); reorder the inverse accordingly
    inv_rc = np.array([[inv[1, 1], inv[1, 0]], [inv[0, 1], inv[0, 0]]])
    shift_rc = np.array([cy + t.translate_dy, cx + t.translate_dx])
    offset = np.array([cy, cx]) - inv_rc @ shift_rc
    out = np.empty_like(img.pixels, dtype=np.float64)
    for c in range(img.channels):
        out[:, :, c] = ndimage.affine_transform(
            img.pixels[:, :, c].astype(np.float64),
            inv_rc,
            offset=offset,
            order=1,
            mode="constant",
            cval=1.0,
        )
    return RasterImage(np.clip(out, 0.0, 1.0).astype(np.float32))


def augment_pair(pair: PairedSample, t: AffineTransform) -> PairedSample:
    """Warp source and target with the same transform; record it in meta."""
    meta = dict(pair.meta)
    meta["transform"] = transform_to_dict(t)
    return PairedSample(warp_image(pair.source, t), warp_image(pair.target, t), meta)


def transform_to_dict(t: AffineTransform) -> dict:
    return {
        "rotate_deg": t.rotate_deg,
        "scale": t.scale,
        "flip_h": t.flip_h,
        "dx": t.translate_dx,
        "dy": t.translate_dy,
    }


def transform_from_dict(d: dict) -> AffineTransform:
    return AffineTransform(
        rotate_deg=d["rotate_deg"],
        scale=d["scale"],
        translate_dx=d["dx"],
        translate_dy=d["dy"],
        flip_h=d["flip_h"],
    )


def layout_space_transform(t: AffineTransform, layout: ShapeLayout, img_w: int, img_h: int) -> AffineTransform:
    """Rescale an image-pixel transform into layout canvas units."""
    return replace(
        t,
        translate_dx=t.translate_dx * layout.canvas_w / img_w,
        translate_dy=t.translate_dy * layout.canvas_h / img_h,
    )


def expand_corpus(manifest: Manifest, plan: AugmentationPlan, out_dir) -> Manifest:
    """Expand every base sample into ``plan.per_base`` variants.

    Variant #0 is always the identity (byte-identical copy of the base).
    Deterministic given plan.rng_seed: each variant draws from its own
    derived seed, so output is independent of iteration order.
    """
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for base_index, base_entry in enumerate(manifest.entries):
        base_id = base_entry["id"]
        base_pair = manifest.load_pair(base_id)
        base_layout = None
        if manifest.layout_path(base_id).exists():
            base_layout = manifest.load_layout(base_id)
        for k in range(plan.per_base):
            if k == 0:
                t = AffineTransform()
            else:
                rng = np.random.Generator(np.random.PCG64(derive_seed(plan.rng_seed, base_index, k)))
                t = plan.sample_transform(rng, base_pair.source.width, base_pair.source.height)
            variant_id = f"{base_id}_v{k:02d}"
            out_pair = augment_pair(replace(base_pair, meta={"id": variant_id}), t)
            layout = None
            if base_layout is not None:
                lt = layout_space_transform(t, base_layout, base_pair.source.width, base_pair.source.height)
                layout = transform_layout(base_layout, lt)
                if plan.source_from_layout and k > 0:
                    from .raster import rasterize

                    sharp = rasterize(layout, out_pair.source.width, out_pair.source.height)
                    out_pair = replace(out_pair, source=sharp)
            digest = write_pair(root, variant_id, out_pair, layout)
            entries.append(
                {
                    "id": variant_id,
                    "base_id": base_id,
                    "seed": base_entry.get("seed"),
                    "sha256": digest,
                    "transform": out_pair.meta["transform"],
                }
            )
    out = Manifest(root=root, size=manifest.size, entries=entries)
    out.save()
    return out
