"""Procedural toon-face renderer and randomized face-layout sampler.

The renderer turns a mouse-face layout (3 circles + 2 ovals) into a flat-
shaded cartoon head. It is the target-domain generator for the synthetic
paired corpus: deterministic, original styling, no licensed artwork.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .raster import RasterImage, composite, shape_coverage
from .shapes import CIRCLE, OVAL, ShapeLayout, ShapePrimitive, circle, oval

TEMPLATE_CANVAS = 256

# mouse_face template geometry, in fractions of the head radius
_HEAD_R = 52.0
_EAR_R_RATIO = 0.55
_EAR_ANGLE_DEG = 45.0  # from vertical, symmetric left/right
_MUZZLE_CENTER = 0.52  # below head center
_MUZZLE_RX = 0.48
_MUZZLE_RY = 0.28
_NOSE_CENTER = 0.34
_NOSE_RX = 0.16
_NOSE_RY = 0.10

# jitter spans (uniform, fraction of nominal unless stated)
_POS_JITTER = 0.08  # of head radius, on centers
_RADIUS_JITTER = 0.15


class ToonError(ValueError):
    pass


@dataclass(frozen=True)
class EyeSpec:
    count: int = 2
    rel_size: float = 0.10  # eye radius as a fraction of head radius
    rel_pos: tuple = (0.30, 0.34)  # (horizontal, vertical) offset fractions

    def __post_init__(self):
        if not (0.0 <= self.rel_size <= 1.0 and 0.0 <= self.rel_pos[0] <= 1.0 and 0.0 <= self.rel_pos[1] <= 1.0):
            raise ToonError("eye relative size/position must lie in [0, 1]")


def _check_color(c, name):
    if len(c) != 3 or any(not (0.0 <= v <= 1.0) for v in c):
        raise ToonError(f"{name} must be an RGB triple in [0, 1]^3")
    return tuple(float(v) for v in c)


@dataclass(frozen=True)
class ToonStyle:
    head_fill: tuple = (0.13, 0.11, 0.12)
    ear_fill: tuple = (0.13, 0.11, 0.12)
    face_fill: tuple = (0.95, 0.78, 0.60)
    eye_spec: EyeSpec = field(default_factory=EyeSpec)
    outline_width: float = 2.0
    background: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        for name in ("head_fill", "ear_fill", "face_fill", "background"):
            object.__setattr__(self, name, _check_color(getattr(self, name), name))
        if not self.outline_width > 0:
            raise ToonError("outline_width must be positive")


DEFAULT_STYLE = ToonStyle()


def sample_layout(rng_seed: int, template: str = "mouse_face") -> ShapeLayout:
    """Draw a randomized but structurally valid mouse-face layout.

    Always 3 circles (head + two ears, tangent-adjacent) and 2 ovals
    (muzzle + nose). Deterministic in the seed; ear centers stay above the
    head center and ear_r/head_r stays within the template ratio band.
    """
    if template != "mouse_face":
        raise ToonError(f"unknown template {template!r}")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    u = lambda lo, hi: float(rng.uniform(lo, hi))

    head_r = _HEAD_R * (1.0 + u(-_RADIUS_JITTER, _RADIUS_JITTER))
    hx = TEMPLATE_CANVAS / 2.0 + u(-1.0, 1.0) * _POS_JITTER * head_r
    hy = TEMPLATE_CANVAS / 2.0 + 10.0 + u(-1.0, 1.0) * _POS_JITTER * head_r

    shapes = [circle(hx, hy, head_r)]
    for side in (-1.0, 1.0):
        ear_r = head_r * (_EAR_R_RATIO + u(-0.12, 0.12))
        ang = math.radians(_EAR_ANGLE_DEG + u(-8.0, 8.0))
        # tangent-adjacent: centers separated by r_head + r_ear, slightly sunk
        dist = (head_r + ear_r) * (1.0 + u(-0.06, 0.0))
        ex = hx + side * dist * math.sin(ang)
        ey = hy - dist * math.cos(ang)
        shapes.append(circle(ex, ey, ear_r))

    jit = lambda: u(-1.0, 1.0) * _POS_JITTER * head_r * 0.5
    muzzle = oval(
        hx + jit(),
        hy + _MUZZLE_CENTER * head_r,
        head_r * _MUZZLE_RX * (1.0 + u(-0.1, 0.1)),
        head_r * _MUZZLE_RY * (1.0 + u(-0.1, 0.1)),
        rotation_deg=u(-6.0, 6.0) % 360.0,
    )
    nose = oval(
        hx + jit() * 0.5,
        hy + _NOSE_CENTER * head_r,
        head_r * _NOSE_RX * (1.0 + u(-0.1, 0.1)),
        head_r * _NOSE_RY * (1.0 + u(-0.1, 0.1)),
    )
    shapes += [muzzle, nose]
    return ShapeLayout(TEMPLATE_CANVAS, TEMPLATE_CANVAS, tuple(shapes))


def classify_face(layout: ShapeLayout):
    """Split a mouse-face-family layout into roles by geometry.

    head = largest circle; remaining circles = ears; largest oval = muzzle,
    next = nose. Raises ToonError when no circle is present.
    """
    circles = sorted(layout.circles, key=lambda s: -s.rx)
    if not circles:
        raise ToonError("layout has no head-class circle")
    ovals = sorted(layout.ovals, key=lambda s: -(s.rx * s.ry))
    return {
        "head": circles[0],
        "ears": tuple(circles[1:]),
        "muzzle": ovals[0] if ovals else None,
        "nose": ovals[1] if len(ovals) > 1 else None,
    }


def _paint(canvas, shape, w, h, sx, sy, color, band):
    cov, origin = shape_coverage(shape, w, h, sx, sy, band=band)
    composite(canvas, cov, origin, color)


def render_toon(layout: ShapeLayout, style: ToonStyle, w: int, h: int) -> RasterImage:
    """Render the flat-shaded toon face for a mouse-face layout.

    Paint order is by role (ears, head, muzzle, nose, eyes, outlines), not
    list order, so the result is independent of how the user stacked shapes.
    Deterministic for identical inputs.
    """
    roles = classify_face(layout)
    sx = w / layout.canvas_w
    sy = h / layout.canvas_h
    canvas = np.ones((h, w, 3), dtype=np.float64)
    canvas *= np.asarray(style.background, dtype=np.float64)[None, None, :]

    ow = style.outline_width
    outline = tuple(v * 0.45 for v in style.head_fill)

    def solid(shape, color):
        s = replace(shape, stroke_width=ow)
        _paint(canvas, s, w, h, sx, sy, color, "fill")
        _paint(canvas, s, w, h, sx, sy, outline, "stroke")

    for ear in roles["ears"]:
        solid(ear, style.ear_fill)
    solid(roles["head"], style.head_fill)
    if roles["muzzle"] is not None:
        solid(roles["muzzle"], style.face_fill)
    if roles["nose"] is not None:
        nose_fill = tuple(v * 0.6 for v in style.head_fill)
        solid(roles["nose"], nose_fill)

    head = roles["head"]
    eyes = style.eye_spec
    eye_r = max(1.0, eyes.rel_size * head.rx)
    offsets = [-1.0, 1.0] if eyes.count == 2 else [0.0] * min(eyes.count, 1)
    for side in offsets:
        ex = head.cx + side * eyes.rel_pos[0] * head.rx
        ey = head.cy - eyes.rel_pos[1] * head.rx
        white = ShapePrimitive(OVAL, ex, ey, eye_r * 0.78, eye_r, stroke_width=ow)
        _paint(canvas, white, w, h, sx, sy, (0.98, 0.98, 0.97), "fill")
        pupil = ShapePrimitive(CIRCLE, ex, ey + eye_r * 0.3, eye_r * 0.32, eye_r * 0.32, stroke_width=ow)
        _paint(canvas, pupil, w, h, sx, sy, (0.05, 0.05, 0.06), "fill")

    return RasterImage(np.clip(canvas, 0.0, 1.0).astype(np.float32))
