// Canvas session state: the working layout, selection, mode, and an undo
// stack of layout snapshots (depth-capped). Every mutation validates before
// committing, so the session can never hold a schema-invalid layout.

import {
  LayoutValidationError,
  ShapeLayout,
  ShapePrimitive,
  cloneLayout,
  validateLayout,
} from "./layout.js";
import { Adjustment, applyAdjustment } from "./gestures.js";

export const MAX_UNDO_DEPTH = 100;

export type Mode = "draw" | "annotate";

export class CanvasSession {
  layout: ShapeLayout;
  selected: number | null = null;
  mode: Mode = "draw";
  backgroundImage: unknown = null; // annotate mode only; opaque to the logic
  private undoStack: ShapeLayout[] = [];
  private redoStack: ShapeLayout[] = [];

  constructor(canvasW = 256, canvasH = 256) {
    this.layout = { canvas: { w: canvasW, h: canvasH }, shapes: [] };
  }

  get shapes(): ShapePrimitive[] {
    return this.layout.shapes;
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  private commit(mutate: (draft: ShapeLayout) => void): void {
    const draft = cloneLayout(this.layout);
    mutate(draft);
    if (draft.shapes.length > 0) {
      validateLayout(draft); // invalid edits are rejected before the snapshot
    }
    this.undoStack.push(cloneLayout(this.layout));
    if (this.undoStack.length > MAX_UNDO_DEPTH) {
      this.undoStack.shift();
    }
    this.redoStack = [];
    this.layout = draft;
  }

  addShape(shape: ShapePrimitive): void {
    this.commit((draft) => {
      draft.shapes.push({ ...shape });
    });
    this.selected = this.layout.shapes.length - 1;
  }

  adjustSelected(adj: Adjustment): void {
    if (this.selected === null) {
      return;
    }
    const index = this.selected;
    this.commit((draft) => {
      draft.shapes[index] = applyAdjustment(draft.shapes[index], adj);
    });
  }

  deleteSelected(): void {
    if (this.selected === null) {
      return;
    }
    const index = this.selected;
    this.commit((draft) => {
      draft.shapes.splice(index, 1);
    });
    this.selected = null;
  }

  clear(): void {
    if (this.layout.shapes.length === 0) {
      return;
    }
    this.commit((draft) => {
      draft.shapes = [];
    });
    this.selected = null;
  }

  loadLayout(layout: ShapeLayout): void {
    validateLayout(layout);
    this.commit((draft) => {
      draft.canvas = { ...layout.canvas };
      draft.shapes = cloneLayout(layout).shapes;
    });
    this.selected = null;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) {
      return false;
    }
    this.redoStack.push(cloneLayout(this.layout));
    this.layout = prev;
    this.selected = null;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) {
      return false;
    }
    this.undoStack.push(cloneLayout(this.layout));
    this.layout = next;
    this.selected = null;
    return true;
  }

  canTransfer(): boolean {
    return this.layout.shapes.length > 0;
  }
}

export { LayoutValidationError };
