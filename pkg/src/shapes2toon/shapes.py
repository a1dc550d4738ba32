"""Geometric layout domain: circle/oval primitives, serialization, affine transforms.

A layout is an ordered list of primitives on an integer canvas. The JSON
document produced by :func:`serialize_layout` is the wire format shared with
the drawing UI and the inference service.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace


class LayoutError(ValueError):
    """Base class for layout parse/validation failures. Carries a field path."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class LayoutParseError(LayoutError):
    pass


class LayoutValidationError(LayoutError):
    pass


CIRCLE = "circle"
OVAL = "oval"


@dataclass(frozen=True)
class ShapePrimitive:
    """A circle or oval: center, semi-axes, rotation, stroke width, fill flag.

    ``kind == "circle"`` requires ``rx == ry``. Rotation is normalized into
    [0, 360) at construction.
    """

    kind: str
    cx: float
    cy: float
    rx: float
    ry: float
    rotation_deg: float = 0.0
    stroke_width: float = 2.0
    fill: bool = False

    def __post_init__(self):
        if self.kind not in (CIRCLE, OVAL):
            raise LayoutValidationError(f"kind must be 'circle' or 'oval', got {self.kind!r}", "kind")
        if not (self.rx > 0 and self.ry > 0):
            raise LayoutValidationError(f"semi-axes must be positive, got rx={self.rx}, ry={self.ry}", "rx")
        if self.kind == CIRCLE and self.rx != self.ry:
            raise LayoutValidationError(f"circle requires rx == ry, got rx={self.rx}, ry={self.ry}", "rx")
        if not self.stroke_width > 0:
            raise LayoutValidationError(f"stroke_width must be positive, got {self.stroke_width}", "stroke_width")
        object.__setattr__(self, "rotation_deg", _norm_angle(self.rotation_deg))

    def bounding_box(self):
        """Axis-aligned (x0, y0, x1, y1) of the rotated ellipse plus stroke margin."""
        t = math.radians(self.rotation_deg)
        hw = self.stroke_width / 2.0
        hx = math.hypot(self.rx * math.cos(t), self.ry * math.sin(t)) + hw
        hy = math.hypot(self.rx * math.sin(t), self.ry * math.cos(t)) + hw
        return (self.cx - hx, self.cy - hy, self.cx + hx, self.cy + hy)


def circle(cx, cy, r, **kw) -> ShapePrimitive:
    return ShapePrimitive(CIRCLE, cx, cy, r, r, **kw)


def oval(cx, cy, rx, ry, rotation_deg=0.0, **kw) -> ShapePrimitive:
    return ShapePrimitive(OVAL, cx, cy, rx, ry, rotation_deg, **kw)


@dataclass(frozen=True)
class ShapeLayout:
    canvas_w: int
    canvas_h: int
    shapes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not (isinstance(self.canvas_w, int) and isinstance(self.canvas_h, int)):
            raise LayoutValidationError("canvas dimensions must be integers", "canvas")
        if self.canvas_w <= 0 or self.canvas_h <= 0:
            raise LayoutValidationError(f"canvas must be positive, got {self.canvas_w}x{self.canvas_h}", "canvas")
        object.__setattr__(self, "shapes", tuple(self.shapes))

    @property
    def circles(self):
        return tuple(s for s in self.shapes if s.kind == CIRCLE)

    @property
    def ovals(self):
        return tuple(s for s in self.shapes if s.kind == OVAL)


_CANVAS_KEYS = {"w", "h"}
_SHAPE_KEYS = {"kind", "cx", "cy", "rx", "ry", "rotation_deg", "stroke_width", "fill"}
_SHAPE_REQUIRED = {"kind", "cx", "cy", "rx", "ry"}


def _norm_angle(deg):
    a = float(deg) % 360.0
    return a if a != 360.0 else 0.0  # -1e-16 % 360 == 360.0 under IEEE rounding


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LayoutParseError(f"expected a number, got {type(value).__name__}", path)
    if not math.isfinite(value):
        raise LayoutParseError("number must be finite", path)
    return float(value)


def _parse_shape(obj, path):
    if not isinstance(obj, dict):
        raise LayoutParseError("shape must be an object", path)
    unknown = set(obj) - _SHAPE_KEYS
    if unknown:
        raise LayoutParseError(f"unknown field(s) {sorted(unknown)}", path)
    missing = _SHAPE_REQUIRED - set(obj)
    if missing:
        raise LayoutParseError(f"missing field(s) {sorted(missing)}", path)
    kind = obj["kind"]
    if kind not in (CIRCLE, OVAL):
        raise LayoutParseError(f"kind must be 'circle' or 'oval', got {kind!r}", f"{path}.kind")
    fill = obj.get("fill", False)
    if not isinstance(fill, bool):
        raise LayoutParseError("fill must be a boolean", f"{path}.fill")
    try:
        return ShapePrimitive(
            kind=kind,
            cx=_number(obj["cx"], f"{path}.cx"),
            cy=_number(obj["cy"], f"{path}.cy"),
            rx=_number(obj["rx"], f"{path}.rx"),
            ry=_number(obj["ry"], f"{path}.ry"),
            rotation_deg=_number(obj.get("rotation_deg", 0.0), f"{path}.rotation_deg"),
            stroke_width=_number(obj.get("stroke_width", 2.0), f"{path}.stroke_width"),
            fill=fill,
        )
    except LayoutValidationError as e:
        raise LayoutValidationError(str(e).split(": ", 1)[-1], f"{path}.{e.path}") from e


def parse_layout(text: str) -> ShapeLayout:
    """Parse and validate a layout document (see module docstring for the schema).

    Rejects unknown fields, non-finite numbers, invariant violations
    (rx <= 0, circle with rx != ry), empty layouts, and shapes whose bounding
    box misses the canvas entirely. Error messages carry the offending field
    path, e.g. ``shapes[2].rx``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LayoutParseError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise LayoutParseError("document root must be an object")
    unknown = set(doc) - {"canvas", "shapes"}
    if unknown:
        raise LayoutParseError(f"unknown field(s) {sorted(unknown)}")
    if "canvas" not in doc or "shapes" not in doc:
        raise LayoutParseError("document requires 'canvas' and 'shapes'")
    canvas = doc["canvas"]
    if not isinstance(canvas, dict) or set(canvas) != _CANVAS_KEYS:
        raise LayoutParseError("canvas must be an object with fields 'w' and 'h'", "canvas")
    for k in ("w", "h"):
        if isinstance(canvas[k], bool) or not isinstance(canvas[k], int):
            raise LayoutParseError("canvas dimensions must be integers", f"canvas.{k}")
        if canvas[k] <= 0:
            raise LayoutValidationError("canvas dimensions must be positive", f"canvas.{k}")
    if not isinstance(doc["shapes"], list):
        raise LayoutParseError("shapes must be an array", "shapes")
    if len(doc["shapes"]) == 0:
        raise LayoutValidationError("layout must contain at least one shape", "shapes")
    shapes = [_parse_shape(s, f"shapes[{i}]") for i, s in enumerate(doc["shapes"])]
    layout = ShapeLayout(canvas["w"], canvas["h"], tuple(shapes))
    for i, s in enumerate(layout.shapes):
        x0, y0, x1, y1 = s.bounding_box()
        if x1 < 0 or y1 < 0 or x0 > layout.canvas_w or y0 > layout.canvas_h:
            raise LayoutValidationError("shape lies entirely off-canvas", f"shapes[{i}]")
    return layout


def layout_to_dict(layout: ShapeLayout) -> dict:
    return {
        "canvas": {"w": layout.canvas_w, "h": layout.canvas_h},
        "shapes": [
            {
                "kind": s.kind,
                "cx": s.cx,
                "cy": s.cy,
                "rx": s.rx,
                "ry": s.ry,
                "rotation_deg": s.rotation_deg,
                "stroke_width": s.stroke_width,
                "fill": s.fill,
            }
            for s in layout.shapes
        ],
    }


def serialize_layout(layout: ShapeLayout) -> str:
    """Canonical JSON form; ``parse_layout(serialize_layout(L)) == L`` exactly."""
    return json.dumps(layout_to_dict(layout), separators=(",", ":"))


@dataclass(frozen=True)
class AffineTransform:
    """Layout-space transform: flip, then rotate+scale about the canvas center,
    then translate. scale is isotropic and must be positive."""

    rotate_deg: float = 0.0
    scale: float = 1.0
    translate_dx: float = 0.0
    translate_dy: float = 0.0
    flip_h: bool = False

    def __post_init__(self):
        if not self.scale > 0:
            raise LayoutValidationError(f"scale must be positive, got {self.scale}", "scale")

    def is_identity(self):
        return (
            self.rotate_deg % 360.0 == 0.0
            and self.scale == 1.0
            and self.translate_dx == 0.0
            and self.translate_dy == 0.0
            and not self.flip_h
        )


IDENTITY_TRANSFORM = AffineTransform()


def transform_layout(layout: ShapeLayout, t: AffineTransform) -> ShapeLayout:
    """Apply ``t`` to every primitive.

    Centers are mapped about the canvas center; semi-axes are multiplied by
    the scale; primitive rotations compose with the transform rotation and
    renormalize into [0, 360). flip_h mirrors cx about the vertical midline
    and negates rotation (applied before the rotation component).
    """
    if t.is_identity():
        return layout
    ccx = layout.canvas_w / 2.0
    ccy = layout.canvas_h / 2.0
    a = math.radians(t.rotate_deg)
    cos_a, sin_a = math.cos(a), math.sin(a)
    out = []
    for s in layout.shapes:
        cx, cy, rot = s.cx, s.cy, s.rotation_deg
        if t.flip_h:
            cx = layout.canvas_w - cx
            rot = -rot
        dx, dy = cx - ccx, cy - ccy
        # y-down image convention: positive angle rotates x toward y
        nx = t.scale * (cos_a * dx - sin_a * dy) + ccx + t.translate_dx
        ny = t.scale * (sin_a * dx + cos_a * dy) + ccy + t.translate_dy
        out.append(
            replace(
                s,
                cx=nx,
                cy=ny,
                rx=s.rx * t.scale,
                ry=s.ry * t.scale,
                rotation_deg=_norm_angle(rot + t.rotate_deg),
            )
        )
    return ShapeLayout(layout.canvas_w, layout.canvas_h, tuple(out))
