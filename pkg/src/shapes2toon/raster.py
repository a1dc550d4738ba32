"""Deterministic rasterization of shape layouts and the RasterImage carrier.

Rendering is pure numpy: per-pixel supersampled coverage of analytic
ellipse bands, so identical inputs always produce bit-identical buffers.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .shapes import ShapeLayout

SUPERSAMPLE = 3  # 3x3 coverage samples per pixel


class RasterError(ValueError):
    pass


@dataclass(frozen=True)
class RasterImage:
    """H x W x C float32 image with values in [0, 1], C in {1, 3}."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float32)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise RasterError(f"expected HxWxC with C in {{1,3}}, got shape {px.shape}")
        if px.size == 0:
            raise RasterError("empty image")
        if float(px.min()) < 0.0 or float(px.max()) > 1.0:
            raise RasterError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def channels(self):
        return self.pixels.shape[2]

    def luminance(self) -> np.ndarray:
        """H x W float64 gray view (Rec.601 weights for RGB)."""
        px = self.pixels.astype(np.float64)
        if self.channels == 1:
            return px[:, :, 0]
        return px[:, :, 0] * 0.299 + px[:, :, 1] * 0.587 + px[:, :, 2] * 0.114

    def to_rgb(self) -> "RasterImage":
        if self.channels == 3:
            return self
        return RasterImage(np.repeat(self.pixels, 3, axis=2))

    def to_uint8(self) -> np.ndarray:
        return np.rint(self.pixels * 255.0).astype(np.uint8)

    def to_png_bytes(self) -> bytes:
        arr = self.to_uint8()
        mode = "RGB" if self.channels == 3 else "L"
        img = Image.fromarray(arr if self.channels == 3 else arr[:, :, 0], mode)
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path):
        with open(path, "wb") as f:
            f.write(self.to_png_bytes())

    def resize(self, w: int, h: int) -> "RasterImage":
        if (w, h) == (self.width, self.height):
            return self
        mode = "RGB" if self.channels == 3 else "L"
        img = Image.fromarray(self.to_uint8() if self.channels == 3 else self.to_uint8()[:, :, 0], mode)
        img = img.resize((w, h), Image.BILINEAR)
        return from_uint8(np.asarray(img))


def from_uint8(arr: np.ndarray) -> RasterImage:
    return RasterImage(np.asarray(arr, dtype=np.float32) / np.float32(255.0))


def load_png(path_or_bytes) -> RasterImage:
    if isinstance(path_or_bytes, (bytes, bytearray)):
        img = Image.open(io.BytesIO(path_or_bytes))
    else:
        img = Image.open(path_or_bytes)
    img = img.convert("RGB") if img.mode not in ("L",) else img
    return from_uint8(np.asarray(img))


def _subsample_grid(x0, y0, x1, y1):
    """Supersample coordinates for the pixel window [x0,x1) x [y0,y1).

    Returns (ys, xs) broadcastable arrays of sample centers, shaped so the
    trailing two axes are the sub-pixel grid.
    """
    s = SUPERSAMPLE
    offs = (np.arange(s, dtype=np.float64) + 0.5) / s
    px = np.arange(x0, x1, dtype=np.float64)
    py = np.arange(y0, y1, dtype=np.float64)
    xs = px[:, None] + offs[None, :]  # (W, s)
    ys = py[:, None] + offs[None, :]  # (H, s)
    return ys, xs


def shape_coverage(shape, w, h, sx=1.0, sy=1.0, band="stroke"):
    """Fractional pixel coverage of a primitive rendered into a w x h grid.

    ``sx, sy`` scale layout coordinates into the output grid. ``band`` selects
    the painted region: "stroke" (annulus of stroke_width), "fill" (interior
    including stroke), or "interior" (inside the nominal boundary).
    Returns (coverage array, (x0, y0)) for the clipped bounding window.
    """
    bx0, by0, bx1, by1 = shape.bounding_box()
    x0 = max(0, int(math.floor(bx0 * sx)) - 1)
    y0 = max(0, int(math.floor(by0 * sy)) - 1)
    x1 = min(w, int(math.ceil(bx1 * sx)) + 1)
    y1 = min(h, int(math.ceil(by1 * sy)) + 1)
    if x0 >= x1 or y0 >= y1:
        return np.zeros((0, 0)), (0, 0)

    ys, xs = _subsample_grid(x0, y0, x1, y1)
    # map output samples back into layout coordinates
    lx = xs / sx - shape.cx  # (W, s)
    ly = ys / sy - shape.cy  # (H, s)
    t = math.radians(shape.rotation_deg)
    cos_t, sin_t = math.cos(t), math.sin(t)
    # rotate into the ellipse frame; broadcast to (H, W, s, s)
    u = cos_t * lx[None, :, None, :] + sin_t * ly[:, None, :, None]
    v = -sin_t * lx[None, :, None, :] + cos_t * ly[:, None, :, None]

    hw = shape.stroke_width / 2.0

    def inside(rx, ry):
        if rx <= 0 or ry <= 0:
            return np.zeros(u.shape, dtype=bool)
        return (u / rx) ** 2 + (v / ry) ** 2 <= 1.0

    if band == "stroke":
        mask = inside(shape.rx + hw, shape.ry + hw) & ~inside(shape.rx - hw, shape.ry - hw)
    elif band == "fill":
        mask = inside(shape.rx + hw, shape.ry + hw)
    elif band == "interior":
        mask = inside(shape.rx, shape.ry)
    else:
        raise ValueError(f"unknown band {band!r}")
    cov = mask.mean(axis=(2, 3))
    return cov, (x0, y0)


def composite(canvas: np.ndarray, cov: np.ndarray, origin, color) -> None:
    """Alpha-blend ``color`` over ``canvas`` (H x W x 3 float64) in place."""
    if cov.size == 0:
        return
    x0, y0 = origin
    hh, ww = cov.shape
    window = canvas[y0 : y0 + hh, x0 : x0 + ww]
    c = np.asarray(color, dtype=np.float64)
    window *= 1.0 - cov[:, :, None]
    window += cov[:, :, None] * c[None, None, :]


def rasterize(layout: ShapeLayout, w: int, h: int) -> RasterImage:
    """Render a layout as dark anti-aliased strokes on a white background.

    Deterministic: identical inputs give bit-identical buffers. Layout
    coordinates are scaled from canvas_w x canvas_h to w x h. Shapes with
    ``fill=True`` paint their interior as well.
    """
    if w <= 0 or h <= 0:
        raise RasterError(f"output dimensions must be positive, got {w}x{h}")
    if len(layout.shapes) == 0:
        raise RasterError("cannot rasterize an empty layout")
    sx = w / layout.canvas_w
    sy = h / layout.canvas_h
    canvas = np.ones((h, w, 3), dtype=np.float64)
    for shape in layout.shapes:
        band = "fill" if shape.fill else "stroke"
        cov, origin = shape_coverage(shape, w, h, sx, sy, band=band)
        composite(canvas, cov, origin, (0.0, 0.0, 0.0))
    return RasterImage(canvas.astype(np.float32))
