import math

import numpy as np
import pytest

from shapes2toon.raster import RasterError, RasterImage, from_uint8, load_png, rasterize
from shapes2toon.shapes import ShapeLayout, circle, oval


def test_pixel_range_enforced():
    with pytest.raises(RasterError):
        RasterImage(np.full((4, 4, 3), 1.5, dtype=np.float32))
    with pytest.raises(RasterError):
        RasterImage(np.full((4, 4, 2), 0.5, dtype=np.float32))


def test_rasterize_rejects_empty_layout():
    with pytest.raises(RasterError):
        rasterize(ShapeLayout(64, 64, ()), 64, 64)


def test_stroke_produces_nonblank_output():
    layout = ShapeLayout(64, 64, (circle(32, 32, 20),))
    img = rasterize(layout, 64, 64)
    assert float((1.0 - img.pixels).sum()) > 0


def test_rasterize_deterministic():
    layout = ShapeLayout(256, 256, (circle(128, 128, 50), oval(60, 60, 30, 12, rotation_deg=30)))
    a = rasterize(layout, 256, 256)
    b = rasterize(layout, 256, 256)
    assert np.array_equal(a.pixels, b.pixels)
    assert a.to_png_bytes() == b.to_png_bytes()


def test_circle_membership_points():
    # point on the ring is dark, far corner stays white
    layout = ShapeLayout(256, 256, (circle(128, 128, 50),))
    img = rasterize(layout, 256, 256)
    assert img.pixels[128, 178, 0] < 0.5
    assert img.pixels[10, 10, 0] > 0.95


def test_output_dimensions_and_scaling():
    layout = ShapeLayout(256, 256, (circle(128, 128, 64, stroke_width=4),))
    img = rasterize(layout, 128, 128)
    assert (img.width, img.height, img.channels) == (128, 128, 3)
    # circle scales with the canvas: ring at radius 32 in the 128px render
    assert img.pixels[64, 64 + 32, 0] < 0.5


@pytest.mark.parametrize("r", [10, 25, 50, 80])
def test_dark_pixel_count_tracks_perimeter(r):
    stroke = 2.0
    layout = ShapeLayout(256, 256, (circle(128, 128, r, stroke_width=stroke),))
    img = rasterize(layout, 256, 256)
    dark = int((img.luminance() < 0.5).sum())
    expected = 2.0 * math.pi * r * stroke
    assert abs(dark - expected) / expected < 0.20


def test_fill_flag_fills_interior():
    layout = ShapeLayout(64, 64, (circle(32, 32, 20, fill=True),))
    img = rasterize(layout, 64, 64)
    assert img.pixels[32, 32, 0] < 0.05


def test_png_round_trip(tmp_path):
    layout = ShapeLayout(64, 64, (oval(32, 32, 20, 10, rotation_deg=45),))
    img = rasterize(layout, 64, 64)
    p = tmp_path / "x.png"
    img.save_png(p)
    back = load_png(p)
    assert np.array_equal(back.to_uint8(), img.to_uint8())


def test_from_uint8_range():
    img = from_uint8(np.full((3, 3, 3), 255, dtype=np.uint8))
    assert float(img.pixels.max()) == 1.0
