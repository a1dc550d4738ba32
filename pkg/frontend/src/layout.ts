// Shape layout model mirroring the server's wire schema. Every layout the UI
// produces must validate here before it is allowed to leave the session, so
// the server parser never sees a document this module would reject.

export type ShapeKind = "circle" | "oval";

export interface ShapePrimitive {
  kind: ShapeKind;
  cx: number;
  cy: number;
  rx: number;
  ry: number;
  rotation_deg: number;
  stroke_width: number;
  fill: boolean;
}

export interface ShapeLayout {
  canvas: { w: number; h: number };
  shapes: ShapePrimitive[];
}

export class LayoutValidationError extends Error {
  constructor(message: string, readonly path: string = "") {
    super(path ? `${path}: ${message}` : message);
  }
}

export function normalizeAngle(deg: number): number {
  const a = ((deg % 360) + 360) % 360;
  return a === 360 ? 0 : a;
}

export function makeShape(
  kind: ShapeKind,
  cx: number,
  cy: number,
  rx: number,
  ry: number,
  rotation = 0,
): ShapePrimitive {
  if (kind === "circle" && rx !== ry) {
    throw new LayoutValidationError("circle requires rx == ry", "rx");
  }
  if (rx <= 0 || ry <= 0) {
    throw new LayoutValidationError("semi-axes must be positive", "rx");
  }
  return {
    kind,
    cx,
    cy,
    rx,
    ry,
    rotation_deg: normalizeAngle(rotation),
    stroke_width: 2,
    fill: false,
  };
}

export function boundingBox(s: ShapePrimitive): [number, number, number, number] {
  const t = (s.rotation_deg * Math.PI) / 180;
  const hw = s.stroke_width / 2;
  const hx = Math.hypot(s.rx * Math.cos(t), s.ry * Math.sin(t)) + hw;
  const hy = Math.hypot(s.rx * Math.sin(t), s.ry * Math.cos(t)) + hw;
  return [s.cx - hx, s.cy - hy, s.cx + hx, s.cy + hy];
}

function checkNumber(v: unknown, path: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new LayoutValidationError("expected a finite number", path);
  }
  return v;
}

export function validateLayout(layout: ShapeLayout): ShapeLayout {
  const { canvas, shapes } = layout;
  if (!Number.isInteger(canvas.w) || !Number.isInteger(canvas.h) || canvas.w <= 0 || canvas.h <= 0) {
    throw new LayoutValidationError("canvas dimensions must be positive integers", "canvas");
  }
  if (shapes.length === 0) {
    throw new LayoutValidationError("layout must contain at least one shape", "shapes");
  }
  shapes.forEach((s, i) => {
    const path = `shapes[${i}]`;
    if (s.kind !== "circle" && s.kind !== "oval") {
      throw new LayoutValidationError("kind must be 'circle' or 'oval'", `${path}.kind`);
    }
    checkNumber(s.cx, `${path}.cx`);
    checkNumber(s.cy, `${path}.cy`);
    if (checkNumber(s.rx, `${path}.rx`) <= 0 || checkNumber(s.ry, `${path}.ry`) <= 0) {
      throw new LayoutValidationError("semi-axes must be positive", `${path}.rx`);
    }
    if (s.kind === "circle" && s.rx !== s.ry) {
      throw new LayoutValidationError("circle requires rx == ry", `${path}.rx`);
    }
    const rot = checkNumber(s.rotation_deg, `${path}.rotation_deg`);
    if (rot < 0 || rot >= 360) {
      throw new LayoutValidationError("rotation must lie in [0, 360)", `${path}.rotation_deg`);
    }
    if (checkNumber(s.stroke_width, `${path}.stroke_width`) <= 0) {
      throw new LayoutValidationError("stroke_width must be positive", `${path}.stroke_width`);
    }
    const [x0, y0, x1, y1] = boundingBox(s);
    if (x1 < 0 || y1 < 0 || x0 > canvas.w || y0 > canvas.h) {
      throw new LayoutValidationError("shape lies entirely off-canvas", path);
    }
  });
  return layout;
}

export function serializeLayout(layout: ShapeLayout): string {
  validateLayout(layout);
  return JSON.stringify({
    canvas: { w: layout.canvas.w, h: layout.canvas.h },
    shapes: layout.shapes.map((s) => ({
      kind: s.kind,
      cx: s.cx,
      cy: s.cy,
      rx: s.rx,
      ry: s.ry,
      rotation_deg: s.rotation_deg,
      stroke_width: s.stroke_width,
      fill: s.fill,
    })),
  });
}

export function parseLayout(text: string): ShapeLayout {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new LayoutValidationError(`invalid JSON: ${(e as Error).message}`);
  }
  const obj = doc as Record<string, unknown>;
  if (typeof obj !== "object" || obj === null || !("canvas" in obj) || !("shapes" in obj)) {
    throw new LayoutValidationError("document requires 'canvas' and 'shapes'");
  }
  const canvas = obj.canvas as { w: number; h: number };
  const rawShapes = obj.shapes as Array<Record<string, unknown>>;
  const shapes: ShapePrimitive[] = rawShapes.map((s) => ({
    kind: s.kind as ShapeKind,
    cx: s.cx as number,
    cy: s.cy as number,
    rx: s.rx as number,
    ry: s.ry as number,
    rotation_deg: (s.rotation_deg ?? 0) as number,
    stroke_width: (s.stroke_width ?? 2) as number,
    fill: (s.fill ?? false) as boolean,
  }));
  return validateLayout({ canvas: { w: canvas.w, h: canvas.h }, shapes });
}

export function cloneLayout(layout: ShapeLayout): ShapeLayout {
  return {
    canvas: { ...layout.canvas },
    shapes: layout.shapes.map((s) => ({ ...s })),
  };
}
