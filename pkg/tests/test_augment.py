import numpy as np
import pytest

from shapes2toon.augment import (
    AugmentError,
    AugmentationPlan,
    augment_pair,
    expand_corpus,
    transform_from_dict,
    warp_image,
)
from shapes2toon.corpus import build_corpus
from shapes2toon.shapes import AffineTransform


def test_identity_variant_pixel_identical(tiny_corpus):
    pair = tiny_corpus.load_pair(tiny_corpus.ids[0])
    out = augment_pair(pair, AffineTransform())
    assert np.array_equal(out.source.pixels, pair.source.pixels)
    assert np.array_equal(out.target.pixels, pair.target.pixels)


def test_flip_involution_within_tolerance(tiny_corpus):
    pair = tiny_corpus.load_pair(tiny_corpus.ids[0])
    t = AffineTransform(flip_h=True)
    once = warp_image(pair.source, t)
    twice = warp_image(once, t)
    assert float(np.abs(twice.pixels - pair.source.pixels).max()) <= 2.0 / 255.0


def test_rotate_round_trip_error_bounded(tiny_corpus):
    # empirical resampling bound fixed ahead of the build: mean |delta| <= 0.02
    pair = tiny_corpus.load_pair(tiny_corpus.ids[1])
    fwd = warp_image(pair.source, AffineTransform(rotate_deg=10.0))
    back = warp_image(fwd, AffineTransform(rotate_deg=-10.0))
    assert float(np.abs(back.pixels - pair.source.pixels).mean()) <= 0.02


def test_degenerate_scale_rejected(tiny_corpus):
    pair = tiny_corpus.load_pair(tiny_corpus.ids[0])
    with pytest.raises(Exception):
        augment_pair(pair, AffineTransform(scale=-1.0))


def test_plan_validation():
    with pytest.raises(AugmentError):
        AugmentationPlan(per_base=0)
    with pytest.raises(AugmentError):
        AugmentationPlan(scale_range=(0.0, 1.0))


def test_expand_count_law(tiny_corpus, tmp_path):
    plan = AugmentationPlan(per_base=15, rng_seed=2)
    out = expand_corpus(tiny_corpus, plan, tmp_path / "aug")
    assert len(out.entries) == len(tiny_corpus.entries) * 15
    assert all(e["id"].startswith(e["base_id"]) for e in out.entries)


def test_expand_single_base_single_variant(tmp_path):
    m = build_corpus(1, 5, tmp_path / "base", size=64)
    out = expand_corpus(m, AugmentationPlan(per_base=1, rng_seed=0), tmp_path / "aug")
    assert len(out.entries) == 1
    assert out.entries[0]["transform"] == {
        "rotate_deg": 0.0, "scale": 1.0, "flip_h": False, "dx": 0.0, "dy": 0.0,
    }
    base_bytes = m.pair_path(m.ids[0]).read_bytes()
    aug_bytes = out.pair_path(out.ids[0]).read_bytes()
    assert base_bytes == aug_bytes


def test_expand_deterministic(tiny_corpus, tmp_path):
    plan = AugmentationPlan(per_base=4, rng_seed=13)
    a = expand_corpus(tiny_corpus, plan, tmp_path / "a")
    b = expand_corpus(tiny_corpus, plan, tmp_path / "b")
    assert [e["sha256"] for e in a.entries] == [e["sha256"] for e in b.entries]


def test_identity_variant_of_every_base_byte_exact(tiny_corpus, tmp_path):
    plan = AugmentationPlan(per_base=3, rng_seed=1)
    out = expand_corpus(tiny_corpus, plan, tmp_path / "aug")
    for base_id in tiny_corpus.ids:
        base_bytes = tiny_corpus.pair_path(base_id).read_bytes()
        assert out.pair_path(f"{base_id}_v00").read_bytes() == base_bytes


def test_recorded_transform_reproduces_variant(tiny_corpus, tmp_path):
    # source/target consistency: reapplying the logged transform matches exactly
    plan = AugmentationPlan(per_base=5, rng_seed=21)
    out = expand_corpus(tiny_corpus, plan, tmp_path / "aug")
    for entry in out.entries:
        if entry["id"].endswith("_v00"):
            continue
        base_pair = tiny_corpus.load_pair(entry["base_id"])
        redone = augment_pair(base_pair, transform_from_dict(entry["transform"]))
        variant = out.load_pair(entry["id"])
        assert np.array_equal(redone.source.to_uint8(), variant.source.to_uint8()), entry["id"]
        assert np.array_equal(redone.target.to_uint8(), variant.target.to_uint8()), entry["id"]


def test_layout_space_source_variant(tiny_corpus, tmp_path):
    # optional sharp-source mode: the variant source comes from the
    # transformed vector layout, and still depicts the same geometry
    plan = AugmentationPlan(per_base=3, rng_seed=4, source_from_layout=True)
    out = expand_corpus(tiny_corpus, plan, tmp_path / "aug")
    entry = next(e for e in out.entries if e["id"].endswith("_v01"))
    variant = out.load_pair(entry["id"])
    layout = out.load_layout(entry["id"])
    from shapes2toon.raster import rasterize

    sharp = rasterize(layout, variant.source.width, variant.source.height)
    assert np.array_equal(variant.source.to_uint8(), sharp.to_uint8())
    # geometry matches the warped rendition to within resampling blur
    warped = warp_image(
        tiny_corpus.load_pair(entry["base_id"]).source, transform_from_dict(entry["transform"])
    )
    assert float(np.abs(warped.pixels - variant.source.pixels).mean()) < 0.05


def test_transform_ranges_respected(tiny_corpus, tmp_path):
    plan = AugmentationPlan(per_base=8, rng_seed=3)
    out = expand_corpus(tiny_corpus, plan, tmp_path / "aug")
    w = tiny_corpus.size
    for e in out.entries:
        t = e["transform"]
        assert abs(t["rotate_deg"]) <= plan.rotate_max_deg
        assert plan.scale_range[0] <= t["scale"] <= plan.scale_range[1]
        assert abs(t["dx"]) <= plan.translate_max_frac * w
        assert abs(t["dy"]) <= plan.translate_max_frac * w
