"""Hough detection of circles and ellipses on high-contrast toon images.

Circles use the classic 3-D (cx, cy, r) accumulator with gradient-direction
voting (two candidate centers per edge pixel per radius). Ellipses use the
major-axis-pair scheme: each candidate pair of edge points fixes center,
orientation and major semi-axis, and third points vote a 1-D minor-axis
accumulator. All votes are integer counts, so the accumulator is exactly
reproducible by a brute-force loop over the same edge set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import RasterImage

# thinned boundaries leave roughly this many edge pixels per perimeter unit;
# used only for score normalization
EDGE_BAND_PX = 1.5


@dataclass(frozen=True)
class HoughConfig:
    r_min: float
    r_max: float
    bin_px: float = 1.0  # accumulator resolution, pixels per bin
    vote_threshold: float = 0.3  # fraction of ideal perimeter votes
    nms_radius: float = 10.0  # in (cx, cy, r) space
    edge_threshold: float = 0.12  # gradient magnitude cutoff
    max_ellipse_points: int = 400  # edge subsample cap for the pair scheme
    max_ellipse_pairs: int = 12000  # stride-subsampled cap on candidate pairs

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError(f"need 0 < r_min < r_max, got ({self.r_min}, {self.r_max})")
        if not (0 < self.vote_threshold <= 1):
            raise ValueError(f"vote_threshold must be in (0, 1], got {self.vote_threshold}")
        if self.bin_px <= 0 or self.edge_threshold <= 0:
            raise ValueError("bin_px and edge_threshold must be positive")


@dataclass(frozen=True)
class CircleDetection:
    cx: float
    cy: float
    r: float
    score: float


@dataclass(frozen=True)
class EllipseDetection:
    cx: float
    cy: float
    rx: float  # major semi-axis, along rotation_deg
    ry: float  # minor semi-axis
    rotation_deg: float
    score: float


def _bilinear(arr, y, x):
    """Bilinear sample of a 2-D array at float coords, 0 outside."""
    h, w = arr.shape
    y0 = np.floor(y).astype(np.int64)
    x0 = np.floor(x).astype(np.int64)
    fy, fx = y - y0, x - x0
    out = np.zeros_like(y, dtype=np.float64)
    for dy, dx, wgt in (
        (0, 0, (1 - fy) * (1 - fx)),
        (0, 1, (1 - fy) * fx),
        (1, 0, fy * (1 - fx)),
        (1, 1, fy * fx),
    ):
        yy, xx = y0 + dy, x0 + dx
        ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        out[ok] += wgt[ok] * arr[yy[ok], xx[ok]]
    return out


def edge_pixels(img: RasterImage, threshold: float, thin: bool = True):
    """Edge positions and unit gradient directions from central differences.

    With ``thin`` (default), non-maximum suppression along the gradient
    direction keeps only ridge pixels, so each boundary contributes a ring
    about one pixel wide. Returns (xs, ys, ux, uy) float64 arrays in scan
    order (row-major).
    """
    gray = img.luminance()
    gy, gx = np.gradient(gray)
    mag = np.hypot(gx, gy)
    ys, xs = np.nonzero(mag >= threshold)
    m = mag[ys, xs]
    ux = gx[ys, xs] / m
    uy = gy[ys, xs] / m
    if thin and len(xs):
        ahead = _bilinear(mag, ys + uy, xs + ux)
        behind = _bilinear(mag, ys - uy, xs - ux)
        keep = (m >= ahead) & (m >= behind)
        xs, ys, ux, uy = xs[keep], ys[keep], ux[keep], uy[keep]
    return (
        xs.astype(np.float64),
        ys.astype(np.float64),
        ux,
        uy,
    )


def radius_values(cfg: HoughConfig) -> np.ndarray:
    n_r = int(math.floor((cfg.r_max - cfg.r_min) / cfg.bin_px)) + 1
    return cfg.r_min + cfg.bin_px * np.arange(n_r, dtype=np.float64)


def accumulate_circle_votes(edges, width: int, height: int, cfg: HoughConfig) -> np.ndarray:
    """Integer vote array of shape (n_radii, n_by, n_bx) for an edge set.

    Contract (kept loop-reproducible): for every edge pixel p with unit
    gradient u, every radius r_k and every sign in (-1, +1), the candidate
    center is p + sign * r_k * u; it votes 1 into bin
    (k, floor(cy / bin), floor(cx / bin)) when inside the grid.
    """
    xs, ys, ux, uy = edges
    radii = radius_values(cfg)
    nbx = int(math.ceil(width / cfg.bin_px))
    nby = int(math.ceil(height / cfg.bin_px))
    acc = np.zeros((len(radii), nby, nbx), dtype=np.int64)
    if len(xs) == 0:
        return acc
    for k, r in enumerate(radii):
        for sign in (-1.0, 1.0):
            cx = xs + sign * r * ux
            cy = ys + sign * r * uy
            bx = np.floor(cx / cfg.bin_px).astype(np.int64)
            by = np.floor(cy / cfg.bin_px).astype(np.int64)
            ok = (bx >= 0) & (bx < nbx) & (by >= 0) & (by < nby)
            np.add.at(acc, (k, by[ok], bx[ok]), 1)
    return acc


def circle_accumulator(img: RasterImage, cfg: HoughConfig) -> np.ndarray:
    return accumulate_circle_votes(edge_pixels(img, cfg.edge_threshold), img.width, img.height, cfg)


def window_vote_fractions(acc: np.ndarray, cfg: HoughConfig) -> np.ndarray:
    """3x3x3-aggregated votes as a fraction of ideal perimeter votes.

    Used for candidate generation only; gradient-angle noise spreads a
    circle's votes over neighboring bins, more so at large radii.
    """
    from scipy import ndimage

    win = ndimage.convolve(acc, np.ones((3, 3, 3), dtype=np.int64), mode="constant", cval=0)
    radii = radius_values(cfg)
    ideal = 2.0 * math.pi * radii / cfg.bin_px
    return win / ideal[:, None, None]


def circle_support_score(edges, cx, cy, r, cfg: HoughConfig) -> float:
    """Fraction of the ideal perimeter vote count actually present.

    Counts edge pixels lying within the annulus r +- 2*bin whose gradient is
    radially aligned, normalized by 2*pi*r / bin and capped at 1. Monotone
    under edge deletion.
    """
    xs, ys, ux, uy = edges
    if len(xs) == 0 or r <= 0:
        return 0.0
    dx = xs - cx
    dy = ys - cy
    d = np.hypot(dx, dy)
    on_ring = np.abs(d - r) <= 2.0 * cfg.bin_px
    if not on_ring.any():
        return 0.0
    safe = d[on_ring] > 1e-9
    align = np.abs(dx[on_ring] * ux[on_ring] + dy[on_ring] * uy[on_ring]) / np.maximum(d[on_ring], 1e-9)
    support = int((safe & (align >= 0.85)).sum())
    ideal = 2.0 * math.pi * r / cfg.bin_px
    return min(1.0, support / ideal)


def _refine_peak(acc, k, by, bx, cfg, span=2):
    """Vote-weighted centroid over a (2*span+1)^3 neighborhood of a peak bin."""
    radii = radius_values(cfg)
    k0, k1 = max(0, k - span), min(acc.shape[0], k + span + 1)
    y0, y1 = max(0, by - span), min(acc.shape[1], by + span + 1)
    x0, x1 = max(0, bx - span), min(acc.shape[2], bx + span + 1)
    block = acc[k0:k1, y0:y1, x0:x1].astype(np.float64)
    total = block.sum()
    if total <= 0:
        return radii[k], (bx + 0.5) * cfg.bin_px, (by + 0.5) * cfg.bin_px
    kk, yy, xx = np.meshgrid(
        radii[k0:k1],
        (np.arange(y0, y1) + 0.5) * cfg.bin_px,
        (np.arange(x0, x1) + 0.5) * cfg.bin_px,
        indexing="ij",
    )
    return (
        float((block * kk).sum() / total),
        float((block * xx).sum() / total),
        float((block * yy).sum() / total),
    )


def nms_circles(detections, nms_radius):
    """Greedy suppression within ``nms_radius`` (Euclidean in (cx, cy, r)).

    Input order does not matter; candidates are re-sorted by score desc with
    deterministic tie-breaks (larger r first, then smaller cy, cx).
    """
    ordered = sorted(detections, key=lambda d: (-d.score, -d.r, d.cy, d.cx))
    kept = []
    for d in ordered:
        if all(
            math.sqrt((d.cx - k.cx) ** 2 + (d.cy - k.cy) ** 2 + (d.r - k.r) ** 2) > nms_radius
            for k in kept
        ):
            kept.append(d)
    return kept


def detect_circles(img: RasterImage, cfg: HoughConfig) -> list:
    """Circles above the vote threshold, NMS-deduplicated, score-descending.

    Accumulator local maxima generate candidates; each candidate is refined
    by a vote centroid and then re-scored by its radially-consistent edge
    support, which suppresses the concentric ring artifacts that plain bin
    counts are prone to.
    """
    from scipy import ndimage

    edges = edge_pixels(img, cfg.edge_threshold)
    acc = accumulate_circle_votes(edges, img.width, img.height, cfg)
    gen = window_vote_fractions(acc, cfg)
    gen_floor = max(0.08, 0.35 * cfg.vote_threshold)
    peaks = (gen >= gen_floor) & (gen == ndimage.maximum_filter(gen, size=3, mode="constant"))
    ks, bys, bxs = np.nonzero(peaks)
    if len(ks) == 0:
        return []
    order = np.argsort(gen[ks, bys, bxs], kind="stable")[::-1][:4000]
    candidates = []
    for i in order:
        k, by, bx = int(ks[i]), int(bys[i]), int(bxs[i])
        r, cx, cy = _refine_peak(acc, k, by, bx, cfg)
        score = circle_support_score(edges, cx, cy, r, cfg)
        if score >= cfg.vote_threshold:
            candidates.append(CircleDetection(cx=cx, cy=cy, r=r, score=score))
    return nms_circles(candidates, cfg.nms_radius)


# ---------------------------------------------------------------------------
# ellipses: major-axis pair voting
# ---------------------------------------------------------------------------


def _subsample(xs, ys, limit):
    n = len(xs)
    if n <= limit:
        return xs, ys
    step = int(math.ceil(n / limit))
    return xs[::step], ys[::step]


def minor_axis_votes(px, py, x1, y1, x2, y2, a, b_min, b_max, bin_px):
    """1-D minor-axis accumulator for one candidate major-axis pair.

    Third points at distance d < a from the midpoint vote for the minor
    semi-axis implied by the half-angle relation
    b^2 = a^2 d^2 sin^2(t) / (a^2 - d^2 cos^2(t)).
    Returns an integer vote array over bins [b_min, b_max].
    """
    cx, cy = (x1 + x2) / 2.0, (y1 + y2) / 2.0
    n_bins = int(math.floor((b_max - b_min) / bin_px)) + 1
    votes = np.zeros(max(n_bins, 1), dtype=np.int64)
    dx, dy = px - cx, py - cy
    d2 = dx * dx + dy * dy
    inside = (d2 < a * a) & (d2 > 1e-12)
    if not inside.any():
        return votes
    d2 = d2[inside]
    fx, fy = px[inside] - x2, py[inside] - y2
    f2 = fx * fx + fy * fy
    a2 = a * a
    d = np.sqrt(d2)
    cos_t = np.clip((a2 + d2 - f2) / (2.0 * a * d), -1.0, 1.0)
    cos2 = cos_t * cos_t
    sin2 = 1.0 - cos2
    denom = a2 - d2 * cos2
    valid = denom > 1e-9
    b = np.sqrt(a2 * d2[valid] * sin2[valid] / denom[valid])
    idx = np.floor((b - b_min) / bin_px).astype(np.int64)
    ok = (idx >= 0) & (idx < n_bins)
    np.add.at(votes, idx[ok], 1)
    return votes


def ellipse_perimeter(a, b):
    # Ramanujan approximation
    h = ((a - b) / (a + b)) ** 2
    return math.pi * (a + b) * (1.0 + 3.0 * h / (10.0 + math.sqrt(4.0 - 3.0 * h)))


def remove_circle_edges(edges, circles, margin=3.0):
    """Drop edge pixels within ``margin`` of any detected circle's ring."""
    xs, ys, ux, uy = edges
    keep = np.ones(len(xs), dtype=bool)
    for c in circles:
        d = np.hypot(xs - c.cx, ys - c.cy)
        keep &= np.abs(d - c.r) > margin
    return xs[keep], ys[keep], ux[keep], uy[keep]


def detect_ellipses(img: RasterImage, cfg: HoughConfig, exclude=()) -> list:
    """Ellipses via the pair scheme; same NMS and score contract as circles.

    rx is the major semi-axis (along rotation_deg), ry the minor. Scores
    normalize peak minor-axis votes by the expected count of subsampled
    on-ellipse edge pixels. ``exclude`` drops edge support of already
    detected circles so their arcs do not drown out smaller ellipses.
    """
    edges = edge_pixels(img, cfg.edge_threshold)
    if exclude:
        edges = remove_circle_edges(edges, exclude)
    axs, ays = edges[0], edges[1]
    n_total = len(axs)
    xs, ys = _subsample(axs, ays, cfg.max_ellipse_points)
    n = len(xs)
    if n < 3:
        return []
    ratio = n / n_total
    b_min = max(2.0, cfg.r_min / 2.0)

    lo2, hi2 = (2 * cfg.r_min) ** 2, (2 * cfg.r_max) ** 2
    pair_lists = []
    n_pairs = 0
    for i in range(n):
        dx = xs[i + 1 :] - xs[i]
        dy = ys[i + 1 :] - ys[i]
        dist2 = dx * dx + dy * dy
        sel = np.nonzero((dist2 >= lo2) & (dist2 <= hi2))[0]
        pair_lists.append((sel, dist2))
        n_pairs += len(sel)
    stride = max(1, int(math.ceil(n_pairs / cfg.max_ellipse_pairs)))

    candidates = []
    counter = 0
    for i in range(n):
        sel, dist2 = pair_lists[i]
        for j_off in sel:
            counter += 1
            if (counter - 1) % stride:
                continue
            j = i + 1 + int(j_off)
            a = math.sqrt(float(dist2[j_off])) / 2.0
            votes = minor_axis_votes(
                xs, ys, xs[i], ys[i], xs[j], ys[j], a, b_min, min(a, cfg.r_max), cfg.bin_px
            )
            peak = int(votes.argmax())
            v = int(votes[peak])
            if v < 4:
                continue
            lo, hi = max(0, peak - 1), min(len(votes), peak + 2)
            w = votes[lo:hi].astype(np.float64)
            centers = b_min + (np.arange(lo, hi) + 0.5) * cfg.bin_px
            b = float((w * centers).sum() / w.sum())
            expected = ellipse_perimeter(a, b) * EDGE_BAND_PX * ratio
            score = v / max(expected, 1.0)
            if score < cfg.vote_threshold:
                continue
            rot = math.degrees(math.atan2(float(ys[j] - ys[i]), float(xs[j] - xs[i]))) % 180.0
            candidates.append(
                EllipseDetection(
                    cx=(float(xs[i]) + float(xs[j])) / 2.0,
                    cy=(float(ys[i]) + float(ys[j])) / 2.0,
                    rx=a,
                    ry=b,
                    rotation_deg=rot,
                    score=score,
                )
            )
    return _nms_ellipses(candidates, cfg.nms_radius)


def _nms_ellipses(detections, nms_radius):
    ordered = sorted(detections, key=lambda d: (-d.score, -d.rx, d.cy, d.cx))
    kept = []
    for d in ordered:
        mean_r = (d.rx + d.ry) / 2.0
        dup = False
        for k in kept:
            kr = (k.rx + k.ry) / 2.0
            if math.sqrt((d.cx - k.cx) ** 2 + (d.cy - k.cy) ** 2 + (mean_r - kr) ** 2) <= nms_radius:
                dup = True
                break
        if not dup:
            kept.append(d)
    return kept
