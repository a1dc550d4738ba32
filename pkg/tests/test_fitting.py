import numpy as np
import pytest

from shapes2toon.fitting import UnfittableError, fit_layout
from shapes2toon.raster import RasterImage, rasterize
from shapes2toon.shapes import ShapeLayout, circle
from shapes2toon.toon import DEFAULT_STYLE, classify_face, render_toon, sample_layout


def test_blank_image_unfittable():
    blank = RasterImage(np.ones((128, 128, 3), dtype=np.float32))
    with pytest.raises(UnfittableError):
        fit_layout(blank)


def test_single_circle_head_recovered():
    img = rasterize(ShapeLayout(256, 256, (circle(120, 130, 45, fill=True),)), 256, 256)
    fitted = fit_layout(img)
    assert len(fitted.circles) >= 1
    head = max(fitted.circles, key=lambda s: s.rx)
    assert np.hypot(head.cx - 120, head.cy - 130) <= 3
    assert abs(head.rx - 45) <= 3


def test_synthetic_toon_round_trip_small_batch():
    # the 50-image sweep runs in the acceptance suite; spot-check 5 here
    errors = []
    for seed in range(5):
        layout = sample_layout(seed)
        img = render_toon(layout, DEFAULT_STYLE, 256, 256)
        fitted = fit_layout(img)
        roles = classify_face(layout)
        true_circles = [roles["head"], *roles["ears"]]
        assert len(fitted.circles) == 3, seed
        used = set()
        for t in true_circles:
            best_i = min(
                (i for i in range(len(fitted.circles)) if i not in used),
                key=lambda i: (fitted.circles[i].cx - t.cx) ** 2 + (fitted.circles[i].cy - t.cy) ** 2,
            )
            used.add(best_i)
            f = fitted.circles[best_i]
            errors.append(float(np.hypot(f.cx - t.cx, f.cy - t.cy)))
    assert float(np.mean(errors)) <= 4.0
    assert max(errors) <= 8.0


def test_fit_layout_shape_budget():
    layout = sample_layout(3)
    img = render_toon(layout, DEFAULT_STYLE, 256, 256)
    fitted = fit_layout(img)
    assert 1 <= len(fitted.circles) <= 3
    assert len(fitted.ovals) <= 2


def test_fitted_layout_serializes():
    from shapes2toon.shapes import parse_layout, serialize_layout

    layout = sample_layout(1)
    img = render_toon(layout, DEFAULT_STYLE, 256, 256)
    fitted = fit_layout(img)
    assert parse_layout(serialize_layout(fitted)) == fitted
