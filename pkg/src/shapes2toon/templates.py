"""Normalized cross-correlation template matching over a bank of scales."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .raster import RasterImage


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    image: RasterImage
    label: str
    scale_range: tuple = (1.0, 1.0)

    def __post_init__(self):
        if not (0 < self.scale_range[0] <= self.scale_range[1]):
            raise TemplateError(f"bad scale range {self.scale_range}")


@dataclass(frozen=True)
class TemplateBank:
    templates: tuple
    match_threshold: float = 0.6
    scale_steps: int = 3  # scales sampled per template across its range

    def __post_init__(self):
        if len(self.templates) == 0:
            raise TemplateError("template bank must not be empty")
        if not (-1.0 <= self.match_threshold <= 1.0):
            raise TemplateError(f"match threshold must be in [-1, 1], got {self.match_threshold}")


@dataclass(frozen=True)
class TemplateMatch:
    x: int
    y: int
    w: int
    h: int
    label: str
    score: float
    scale: float

    @property
    def bbox(self):
        return (self.x, self.y, self.w, self.h)


def normxcorr(template: np.ndarray, image: np.ndarray) -> np.ndarray:
    """Normalized cross-correlation, 'valid' positions only, float64 in [-1, 1].

    FFT-based running sums; degenerate windows (zero variance) score 0.
    """
    t = template.astype(np.float64)
    f = image.astype(np.float64)
    th, tw = t.shape
    ih, iw = f.shape
    if th > ih or tw > iw:
        raise TemplateError(f"template {tw}x{th} larger than image {iw}x{ih}")
    t0 = t - t.mean()
    t_norm = math.sqrt(float((t0 * t0).sum()))
    ones = np.ones_like(t)
    num = fftconvolve(f, t0[::-1, ::-1], mode="valid")
    win_sum = fftconvolve(f, ones[::-1, ::-1], mode="valid")
    win_sq = fftconvolve(f * f, ones[::-1, ::-1], mode="valid")
    n = t.size
    win_var = np.maximum(win_sq - win_sum * win_sum / n, 0.0)
    denom = np.sqrt(win_var) * t_norm
    out = np.zeros_like(num)
    ok = denom > 1e-12
    out[ok] = num[ok] / denom[ok]
    return np.clip(out, -1.0, 1.0)


def _iou(a: TemplateMatch, b: TemplateMatch) -> float:
    x0 = max(a.x, b.x)
    y0 = max(a.y, b.y)
    x1 = min(a.x + a.w, b.x + b.w)
    y1 = min(a.y + a.h, b.y + b.h)
    inter = max(0, x1 - x0) * max(0, y1 - y0)
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


def nms_matches(matches, iou_threshold=0.3):
    """Greedy box suppression: drop any match overlapping a better one by IoU."""
    ordered = sorted(matches, key=lambda m: (-m.score, m.y, m.x))
    kept = []
    for m in ordered:
        if all(_iou(m, k) <= iou_threshold for k in kept):
            kept.append(m)
    return kept


def _scales(template: Template, steps: int):
    lo, hi = template.scale_range
    if steps <= 1 or lo == hi:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def match_templates(img: RasterImage, bank: TemplateBank) -> list:
    """All template matches above the bank threshold, box-NMS applied.

    Sweeps every template over positions and its scale range; scores are
    normalized cross-correlation of the grayscale images.
    """
    gray = img.luminance()
    matches = []
    for tpl in bank.templates:
        base = tpl.image.luminance()
        for s in _scales(tpl, bank.scale_steps):
            th = max(2, int(round(base.shape[0] * s)))
            tw = max(2, int(round(base.shape[1] * s)))
            scaled = np.asarray(
                RasterImage(base[:, :, None].astype(np.float32)).resize(tw, th).pixels[:, :, 0],
                dtype=np.float64,
            )
            scores = normxcorr(scaled, gray)
            ys, xs = np.nonzero(scores >= bank.match_threshold)
            for y, x in zip(ys, xs):
                matches.append(
                    TemplateMatch(
                        x=int(x), y=int(y), w=tw, h=th, label=tpl.label,
                        score=float(scores[y, x]), scale=float(s),
                    )
                )
    return nms_matches(matches)
