// Software rasterizer mirroring the server's renderer: supersampled coverage
// of analytic ellipse bands, dark strokes on white. Keeping the algorithms in
// step bounds the preview-vs-server pixel disagreement to anti-aliasing noise.

import { ShapeLayout, ShapePrimitive, boundingBox } from "./layout.js";

const SUPERSAMPLE = 3;

export interface Raster {
  width: number;
  height: number;
  // row-major grayscale in [0, 1]
  pixels: Float32Array;
}

function strokeCoverage(
  shape: ShapePrimitive,
  px: number,
  py: number,
  sx: number,
  sy: number,
): number {
  const t = (shape.rotation_deg * Math.PI) / 180;
  const cosT = Math.cos(t);
  const sinT = Math.sin(t);
  const hw = shape.stroke_width / 2;
  const outerRx = shape.rx + hw;
  const outerRy = shape.ry + hw;
  const innerRx = shape.rx - hw;
  const innerRy = shape.ry - hw;
  let inside = 0;
  for (let i = 0; i < SUPERSAMPLE; i++) {
    for (let j = 0; j < SUPERSAMPLE; j++) {
      const ox = px + (j + 0.5) / SUPERSAMPLE;
      const oy = py + (i + 0.5) / SUPERSAMPLE;
      const lx = ox / sx - shape.cx;
      const ly = oy / sy - shape.cy;
      const u = cosT * lx + sinT * ly;
      const v = -sinT * lx + cosT * ly;
      const inOuter = (u / outerRx) ** 2 + (v / outerRy) ** 2 <= 1;
      if (!inOuter) {
        continue;
      }
      if (shape.fill) {
        inside++;
        continue;
      }
      const inInner =
        innerRx > 0 && innerRy > 0 && (u / innerRx) ** 2 + (v / innerRy) ** 2 <= 1;
      if (!inInner) {
        inside++;
      }
    }
  }
  return inside / (SUPERSAMPLE * SUPERSAMPLE);
}

export function rasterizeLayout(layout: ShapeLayout, w: number, h: number): Raster {
  const pixels = new Float32Array(w * h).fill(1);
  const sx = w / layout.canvas.w;
  const sy = h / layout.canvas.h;
  for (const shape of layout.shapes) {
    const [bx0, by0, bx1, by1] = boundingBox(shape);
    const x0 = Math.max(0, Math.floor(bx0 * sx) - 1);
    const y0 = Math.max(0, Math.floor(by0 * sy) - 1);
    const x1 = Math.min(w, Math.ceil(bx1 * sx) + 1);
    const y1 = Math.min(h, Math.ceil(by1 * sy) + 1);
    for (let py = y0; py < y1; py++) {
      for (let px = x0; px < x1; px++) {
        const cov = strokeCoverage(shape, px, py, sx, sy);
        if (cov > 0) {
          const idx = py * w + px;
          pixels[idx] = Math.min(pixels[idx], 1 - cov);
        }
      }
    }
  }
  return { width: w, height: h, pixels };
}

export function rasterToImageData(raster: Raster): ImageData {
  const data = new Uint8ClampedArray(raster.width * raster.height * 4);
  for (let i = 0; i < raster.pixels.length; i++) {
    const v = Math.round(raster.pixels[i] * 255);
    data[i * 4] = v;
    data[i * 4 + 1] = v;
    data[i * 4 + 2] = v;
    data[i * 4 + 3] = 255;
  }
  return new ImageData(data, raster.width, raster.height);
}
