import { describe, expect, it } from "vitest";

import {
  applyAdjustment,
  dragToShape,
  hitTest,
  rotateHandleDrag,
  scaleHandleDrag,
} from "../src/gestures.js";
import { makeShape } from "../src/layout.js";

describe("dragToShape", () => {
  it("square drag makes a circle from the bounding box", () => {
    const s = dragToShape("circle", { x: 10, y: 10 }, { x: 110, y: 110 });
    expect(s).not.toBeNull();
    expect(s!.cx).toBe(60);
    expect(s!.cy).toBe(60);
    expect(s!.rx).toBe(50);
    expect(s!.ry).toBe(50);
  });

  it("rectangular drag makes an oval with per-axis semi-axes", () => {
    const s = dragToShape("oval", { x: 10, y: 10 }, { x: 110, y: 60 });
    expect(s!.rx).toBe(50);
    expect(s!.ry).toBe(25);
  });

  it("sub-3px drags are ignored", () => {
    expect(dragToShape("circle", { x: 10, y: 10 }, { x: 12, y: 10 })).toBeNull();
  });
});

describe("adjustments", () => {
  const base = makeShape("oval", 50, 50, 20, 10, 30);

  it("move shifts the center", () => {
    const moved = applyAdjustment(base, { type: "move", dx: 5, dy: -3 });
    expect(moved.cx).toBe(55);
    expect(moved.cy).toBe(47);
  });

  it("scale multiplies both axes", () => {
    const scaled = applyAdjustment(base, { type: "scale", factor: 2 });
    expect(scaled.rx).toBe(40);
    expect(scaled.ry).toBe(20);
  });

  it("rotate composes and normalizes", () => {
    const rotated = applyAdjustment(base, { type: "rotate", deltaDeg: 340 });
    expect(rotated.rotation_deg).toBeCloseTo(10);
  });

  it("rejects non-positive scale", () => {
    expect(() => applyAdjustment(base, { type: "scale", factor: 0 })).toThrow();
  });
});

describe("handle math", () => {
  const shape = makeShape("circle", 100, 100, 30, 30);

  it("scale handle doubles when the drag doubles the center distance", () => {
    const adj = scaleHandleDrag(shape, { x: 130, y: 100 }, { x: 160, y: 100 });
    expect(adj.type).toBe("scale");
    expect((adj as { factor: number }).factor).toBeCloseTo(2);
  });

  it("rotate handle measures the swept angle", () => {
    const adj = rotateHandleDrag(shape, { x: 130, y: 100 }, { x: 100, y: 130 });
    expect((adj as { deltaDeg: number }).deltaDeg).toBeCloseTo(90);
  });

  it("hit test respects rotation", () => {
    const thin = makeShape("oval", 100, 100, 40, 5, 90);
    expect(hitTest(thin, { x: 100, y: 135 })).toBe(true);
    expect(hitTest(thin, { x: 135, y: 100 })).toBe(false);
  });
});
