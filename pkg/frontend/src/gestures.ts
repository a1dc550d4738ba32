// Pointer-gesture arithmetic: drags become shapes, handle drags become edits.
// Pure functions so the interaction math is testable without a DOM.

import { ShapeKind, ShapePrimitive, makeShape, normalizeAngle } from "./layout.js";

export interface Point {
  x: number;
  y: number;
}

export const MIN_DRAG_PX = 3; // accidental-click guard

// A press-drag-release defines the bounding box of the new shape; circles
// take the larger half-extent as radius. Returns null for sub-3px drags.
export function dragToShape(kind: ShapeKind, press: Point, release: Point): ShapePrimitive | null {
  const dx = Math.abs(release.x - press.x);
  const dy = Math.abs(release.y - press.y);
  if (Math.hypot(dx, dy) < MIN_DRAG_PX) {
    return null;
  }
  const cx = (press.x + release.x) / 2;
  const cy = (press.y + release.y) / 2;
  if (kind === "circle") {
    const r = Math.max(dx, dy) / 2;
    return makeShape("circle", cx, cy, r, r);
  }
  return makeShape("oval", cx, cy, Math.max(dx / 2, 1), Math.max(dy / 2, 1));
}

export type Adjustment =
  | { type: "move"; dx: number; dy: number }
  | { type: "scale"; factor: number }
  | { type: "rotate"; deltaDeg: number };

export function applyAdjustment(shape: ShapePrimitive, adj: Adjustment): ShapePrimitive {
  switch (adj.type) {
    case "move":
      return { ...shape, cx: shape.cx + adj.dx, cy: shape.cy + adj.dy };
    case "scale": {
      if (adj.factor <= 0) {
        throw new Error(`scale factor must be positive, got ${adj.factor}`);
      }
      return { ...shape, rx: shape.rx * adj.factor, ry: shape.ry * adj.factor };
    }
    case "rotate":
      return { ...shape, rotation_deg: normalizeAngle(shape.rotation_deg + adj.deltaDeg) };
  }
}

// Handle drags translate to adjustments relative to the shape center.
export function scaleHandleDrag(shape: ShapePrimitive, from: Point, to: Point): Adjustment {
  const d0 = Math.hypot(from.x - shape.cx, from.y - shape.cy);
  const d1 = Math.hypot(to.x - shape.cx, to.y - shape.cy);
  return { type: "scale", factor: d0 > 1e-9 ? d1 / d0 : 1 };
}

export function rotateHandleDrag(shape: ShapePrimitive, from: Point, to: Point): Adjustment {
  const a0 = Math.atan2(from.y - shape.cy, from.x - shape.cx);
  const a1 = Math.atan2(to.y - shape.cy, to.x - shape.cx);
  return { type: "rotate", deltaDeg: ((a1 - a0) * 180) / Math.PI };
}

export function hitTest(shape: ShapePrimitive, p: Point, slopPx = 4): boolean {
  const t = (-shape.rotation_deg * Math.PI) / 180;
  const dx = p.x - shape.cx;
  const dy = p.y - shape.cy;
  const u = dx * Math.cos(t) - dy * Math.sin(t);
  const v = dx * Math.sin(t) + dy * Math.cos(t);
  const rx = shape.rx + slopPx;
  const ry = shape.ry + slopPx;
  return (u / rx) ** 2 + (v / ry) ** 2 <= 1;
}
