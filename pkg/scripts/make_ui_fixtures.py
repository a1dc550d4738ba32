#!/usr/bin/env python3
"""Regenerate the frontend's rasterizer-parity fixtures from the presets."""

import json
from pathlib import Path

from shapes2toon.raster import rasterize
from shapes2toon.shapes import parse_layout

ROOT = Path(__file__).resolve().parent.parent / "frontend"

for name, size in (("mickey-basic", 64), ("tall-ears", 96)):
    doc = (ROOT / "presets" / f"{name}.json").read_text()
    img = rasterize(parse_layout(doc), size, size)
    out = ROOT / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    img.save_png(out / f"{name}-{size}.png")
    (out / f"{name}-{size}.json").write_text(json.dumps({"layout": json.loads(doc), "size": size}))
    print(f"{name} at {size}px")
