"""Automatic layout approximation of a toon image by circles and ovals."""

from __future__ import annotations

import math
from dataclasses import replace

from .hough import HoughConfig, detect_circles, detect_ellipses
from .raster import RasterImage
from .shapes import ShapeLayout, ShapePrimitive, circle, oval


class UnfittableError(ValueError):
    """Raised when no circle or ellipse can be detected at all."""


MAX_CIRCLES = 3  # head + two ears
MAX_OVALS = 2  # muzzle + nose


def default_circle_config(img: RasterImage) -> HoughConfig:
    m = min(img.width, img.height)
    return HoughConfig(
        r_min=max(4.0, 0.055 * m),
        r_max=0.35 * m,
        vote_threshold=0.3,
        nms_radius=max(6.0, 0.05 * m),
    )


def default_ellipse_config(img: RasterImage) -> HoughConfig:
    m = min(img.width, img.height)
    return HoughConfig(
        r_min=max(3.0, 0.03 * m),
        r_max=0.16 * m,
        vote_threshold=0.25,
        nms_radius=max(4.0, 0.03 * m),
    )


def _overlaps(cx, cy, r, kept):
    for k in kept:
        if math.hypot(cx - k.cx, cy - k.cy) < 0.6 * max(r, k.rx):
            return True
    return False


def _duplicates_circle(e, kept_circles):
    mean_r = (e.rx + e.ry) / 2.0
    for k in kept_circles:
        close = math.hypot(e.cx - k.cx, e.cy - k.cy) < 0.5 * k.rx
        similar = 0.6 < mean_r / k.rx < 1.4
        if close and similar:
            return True
    return False


def fit_layout(
    img: RasterImage,
    cfg: HoughConfig | None = None,
    ellipse_cfg: HoughConfig | None = None,
) -> ShapeLayout:
    """Compose circle and ellipse detection into a mouse-face-shaped layout.

    Greedily keeps the top 3 non-overlapping circles, then up to 2 ovals that
    neither duplicate a kept circle nor overlap each other. Detector order is
    already score-descending with deterministic tie-breaks.
    """
    cfg = cfg or default_circle_config(img)
    ellipse_cfg = ellipse_cfg or default_ellipse_config(img)

    circles = detect_circles(img, cfg)
    kept_circles: list[ShapePrimitive] = []
    kept_detections = []
    for d in circles:
        if len(kept_circles) >= MAX_CIRCLES:
            break
        if not _overlaps(d.cx, d.cy, d.r, kept_circles):
            kept_circles.append(circle(d.cx, d.cy, d.r))
            kept_detections.append(d)

    ellipses = detect_ellipses(img, ellipse_cfg, exclude=kept_detections)
    kept_ovals: list[ShapePrimitive] = []
    for e in ellipses:
        if len(kept_ovals) >= MAX_OVALS:
            break
        if _duplicates_circle(e, kept_circles):
            continue
        if _overlaps(e.cx, e.cy, max(e.rx, e.ry), kept_ovals):
            continue
        kept_ovals.append(oval(e.cx, e.cy, e.rx, e.ry, rotation_deg=e.rotation_deg % 360.0))

    shapes = tuple(kept_circles) + tuple(kept_ovals)
    if not shapes:
        raise UnfittableError("no circles or ellipses detected")
    return ShapeLayout(img.width, img.height, shapes)
