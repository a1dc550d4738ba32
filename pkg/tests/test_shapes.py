import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapes2toon.shapes import (
    AffineTransform,
    LayoutError,
    LayoutParseError,
    LayoutValidationError,
    ShapeLayout,
    ShapePrimitive,
    circle,
    oval,
    parse_layout,
    serialize_layout,
    transform_layout,
)

MICKEY_DOC = json.dumps(
    {
        "canvas": {"w": 256, "h": 256},
        "shapes": [
            {"kind": "circle", "cx": 128, "cy": 140, "rx": 52, "ry": 52},
            {"kind": "circle", "cx": 83, "cy": 86, "rx": 28, "ry": 28},
            {"kind": "circle", "cx": 173, "cy": 86, "rx": 28, "ry": 28},
            {"kind": "oval", "cx": 128, "cy": 166, "rx": 25, "ry": 14},
            {"kind": "oval", "cx": 128, "cy": 157, "rx": 8, "ry": 5},
        ],
    }
)


def test_parse_minimal_circle():
    doc = '{"canvas":{"w":256,"h":256},"shapes":[{"kind":"circle","cx":128,"cy":100,"rx":60,"ry":60}]}'
    layout = parse_layout(doc)
    assert len(layout.shapes) == 1
    s = layout.shapes[0]
    assert s.kind == "circle" and s.cx == 128 and s.cy == 100 and s.rx == 60 == s.ry


def test_parse_serialize_canonicalizes_three_circles_two_ovals():
    layout = parse_layout(MICKEY_DOC)
    assert len(layout.circles) == 3
    assert len(layout.ovals) == 2
    canonical = serialize_layout(layout)
    assert serialize_layout(parse_layout(canonical)) == canonical


def test_negative_radius_rejected():
    doc = '{"canvas":{"w":64,"h":64},"shapes":[{"kind":"oval","cx":10,"cy":10,"rx":-5,"ry":4}]}'
    with pytest.raises(LayoutValidationError) as exc:
        parse_layout(doc)
    assert "shapes[0]" in str(exc.value)


def test_circle_requires_equal_axes():
    with pytest.raises(LayoutValidationError):
        ShapePrimitive("circle", 10, 10, 5, 6)
    doc = '{"canvas":{"w":64,"h":64},"shapes":[{"kind":"circle","cx":10,"cy":10,"rx":5,"ry":6}]}'
    with pytest.raises(LayoutValidationError):
        parse_layout(doc)


def test_unknown_fields_rejected_with_path():
    doc = '{"canvas":{"w":64,"h":64},"shapes":[{"kind":"circle","cx":10,"cy":10,"rx":5,"ry":5,"color":"red"}]}'
    with pytest.raises(LayoutParseError) as exc:
        parse_layout(doc)
    assert "shapes[0]" in str(exc.value) and "color" in str(exc.value)
    with pytest.raises(LayoutParseError):
        parse_layout('{"canvas":{"w":64,"h":64},"shapes":[],"extra":1}')


def test_empty_layout_rejected():
    with pytest.raises(LayoutValidationError):
        parse_layout('{"canvas":{"w":64,"h":64},"shapes":[]}')


def test_fully_off_canvas_rejected():
    doc = '{"canvas":{"w":64,"h":64},"shapes":[{"kind":"circle","cx":500,"cy":500,"rx":5,"ry":5}]}'
    with pytest.raises(LayoutValidationError):
        parse_layout(doc)


def test_rotation_normalized():
    s = oval(10, 10, 5, 3, rotation_deg=370.0)
    assert s.rotation_deg == pytest.approx(10.0)
    s = oval(10, 10, 5, 3, rotation_deg=-90.0)
    assert s.rotation_deg == pytest.approx(270.0)


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
radii = st.floats(min_value=0.5, max_value=200.0, allow_nan=False)


@st.composite
def layouts(draw):
    w = draw(st.integers(min_value=16, max_value=512))
    h = draw(st.integers(min_value=16, max_value=512))
    n = draw(st.integers(min_value=1, max_value=6))
    shapes = []
    for _ in range(n):
        kind = draw(st.sampled_from(["circle", "oval"]))
        # keep centers on-canvas so the bbox check passes
        cx = draw(st.floats(min_value=0, max_value=w, allow_nan=False))
        cy = draw(st.floats(min_value=0, max_value=h, allow_nan=False))
        r1 = draw(radii)
        if kind == "circle":
            shapes.append(circle(cx, cy, r1, stroke_width=draw(st.floats(0.5, 10.0))))
        else:
            shapes.append(
                oval(
                    cx,
                    cy,
                    r1,
                    draw(radii),
                    rotation_deg=draw(st.floats(0, 359.999)),
                    stroke_width=draw(st.floats(0.5, 10.0)),
                    fill=draw(st.booleans()),
                )
            )
    return ShapeLayout(w, h, tuple(shapes))


@given(layouts())
@settings(max_examples=150, deadline=None)
def test_roundtrip_parse_serialize(layout):
    assert parse_layout(serialize_layout(layout)) == layout


class TestTransform:
    def test_identity_is_noop(self):
        layout = parse_layout(MICKEY_DOC)
        assert transform_layout(layout, AffineTransform()) == layout

    def test_full_turn_restores_centers(self):
        layout = parse_layout(MICKEY_DOC)
        turned = transform_layout(layout, AffineTransform(rotate_deg=360.0))
        for a, b in zip(layout.shapes, turned.shapes):
            assert math.isclose(a.cx, b.cx, abs_tol=1e-9)
            assert math.isclose(a.cy, b.cy, abs_tol=1e-9)

    def test_flip_involution(self):
        layout = parse_layout(MICKEY_DOC)
        t = AffineTransform(flip_h=True)
        back = transform_layout(transform_layout(layout, t), t)
        for a, b in zip(layout.shapes, back.shapes):
            assert math.isclose(a.cx, b.cx, abs_tol=1e-9)
            assert math.isclose(a.cy, b.cy, abs_tol=1e-9)
            assert math.isclose(a.rotation_deg, b.rotation_deg, abs_tol=1e-9)

    def test_scale_zero_rejected(self):
        with pytest.raises(LayoutError):
            AffineTransform(scale=0.0)
        with pytest.raises(LayoutError):
            AffineTransform(scale=-2.0)

    @given(
        st.floats(min_value=0.0, max_value=360.0),
        st.floats(min_value=0.0, max_value=360.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_rotations_compose(self, a, b):
        layout = parse_layout(MICKEY_DOC)
        two_step = transform_layout(
            transform_layout(layout, AffineTransform(rotate_deg=a)), AffineTransform(rotate_deg=b)
        )
        one_step = transform_layout(layout, AffineTransform(rotate_deg=(a + b) % 360.0))
        for s1, s2 in zip(two_step.shapes, one_step.shapes):
            assert math.isclose(s1.cx, s2.cx, abs_tol=1e-9)
            assert math.isclose(s1.cy, s2.cy, abs_tol=1e-9)
            diff = abs(s1.rotation_deg - s2.rotation_deg) % 360.0
            assert min(diff, 360.0 - diff) < 1e-6

    def test_flip_mirrors_cx_and_negates_rotation(self):
        layout = ShapeLayout(100, 100, (oval(30, 40, 10, 5, rotation_deg=20.0),))
        flipped = transform_layout(layout, AffineTransform(flip_h=True))
        assert flipped.shapes[0].cx == pytest.approx(70.0)
        assert flipped.shapes[0].cy == pytest.approx(40.0)
        assert flipped.shapes[0].rotation_deg == pytest.approx(340.0)

    def test_scale_multiplies_axes(self):
        layout = ShapeLayout(100, 100, (oval(50, 50, 10, 5),))
        scaled = transform_layout(layout, AffineTransform(scale=2.0))
        assert scaled.shapes[0].rx == pytest.approx(20.0)
        assert scaled.shapes[0].ry == pytest.approx(10.0)
