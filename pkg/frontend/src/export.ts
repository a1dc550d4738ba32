// Annotate-mode export: a paired sample in the corpus format, layout half on
// the left and the traced photo on the right, exactly 2W x H.

import { ShapeLayout, serializeLayout } from "./layout.js";
import { Raster, rasterizeLayout } from "./raster.js";

export interface PairExportPlan {
  width: number; // W of each half
  height: number;
  totalWidth: number; // 2W
  layoutJson: string;
  leftHalf: Raster;
}

// The pure part of the export: dimensions and the rendered source half.
// The browser shell composites the right half and encodes the PNG.
export function planPairExport(layout: ShapeLayout, half: number): PairExportPlan {
  if (layout.shapes.length === 0) {
    throw new Error("annotate export needs at least one traced shape");
  }
  return {
    width: half,
    height: half,
    totalWidth: 2 * half,
    layoutJson: serializeLayout(layout),
    leftHalf: rasterizeLayout(layout, half, half),
  };
}

export function exportFilenames(now: Date): { pair: string; layout: string } {
  const stamp = now
    .toISOString()
    .replace(/[-:]/g, "")
    .replace(/\..*/, "")
    .replace("T", "-");
  return { pair: `${stamp}-pair.png`, layout: `${stamp}-layout.json` };
}
