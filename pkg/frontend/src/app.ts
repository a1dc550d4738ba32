// Browser shell: wires the session, gestures and API client to the DOM.

import { Api, ApiError } from "./api.js";
import {
  Adjustment,
  Point,
  dragToShape,
  hitTest,
  rotateHandleDrag,
  scaleHandleDrag,
} from "./gestures.js";
import { ShapeKind, parseLayout, serializeLayout } from "./layout.js";
import { rasterToImageData, rasterizeLayout } from "./raster.js";
import { exportFilenames, planPairExport } from "./export.js";
import { CanvasSession } from "./session.js";

type Tool = "circle" | "oval" | "select";

export class App {
  private session = new CanvasSession(256, 256);
  private api = new Api("");
  private tool: Tool = "circle";
  private drag: { start: Point; kind: "create" | "move" | "scale" | "rotate" } | null = null;
  private dragPreview: Point | null = null;
  private inFlight = false;
  private pendingTransfer = false;
  private background: HTMLImageElement | null = null;

  constructor(
    private canvas: HTMLCanvasElement,
    private result: HTMLImageElement,
    private banner: HTMLElement,
    private controls: Record<string, HTMLElement>,
  ) {
    canvas.addEventListener("pointerdown", (e) => this.onDown(this.toCanvas(e)));
    canvas.addEventListener("pointermove", (e) => this.onMove(this.toCanvas(e)));
    canvas.addEventListener("pointerup", (e) => this.onUp(this.toCanvas(e)));
    window.addEventListener("keydown", (e) => {
      if (e.key === "Delete" || e.key === "Backspace") {
        this.session.deleteSelected();
        this.redraw();
      }
    });
    this.redraw();
  }

  setTool(tool: Tool): void {
    this.tool = tool;
  }

  setMode(mode: "draw" | "annotate"): void {
    this.session.mode = mode;
    this.redraw();
  }

  private toCanvas(e: PointerEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return {
      x: ((e.clientX - rect.left) / rect.width) * this.session.layout.canvas.w,
      y: ((e.clientY - rect.top) / rect.height) * this.session.layout.canvas.h,
    };
  }

  private onDown(p: Point): void {
    if (this.tool === "select") {
      const hit = this.session.shapes.findIndex((s) => hitTest(s, p));
      this.session.selected = hit >= 0 ? hit : null;
      this.drag = hit >= 0 ? { start: p, kind: "move" } : null;
    } else {
      this.drag = { start: p, kind: "create" };
    }
    this.dragPreview = p;
    this.redraw();
  }

  private onMove(p: Point): void {
    if (this.drag) {
      this.dragPreview = p;
      this.redraw();
    }
  }

  private onUp(p: Point): void {
    if (!this.drag) {
      return;
    }
    const { start, kind } = this.drag;
    this.drag = null;
    this.dragPreview = null;
    if (kind === "create") {
      const shape = dragToShape(this.tool as ShapeKind, start, p);
      if (shape) {
        try {
          this.session.addShape(shape);
        } catch (e) {
          this.showBanner((e as Error).message);
        }
      }
    } else if (this.session.selected !== null) {
      const shape = this.session.shapes[this.session.selected];
      let adj: Adjustment;
      if (kind === "scale") {
        adj = scaleHandleDrag(shape, start, p);
      } else if (kind === "rotate") {
        adj = rotateHandleDrag(shape, start, p);
      } else {
        adj = { type: "move", dx: p.x - start.x, dy: p.y - start.y };
      }
      try {
        this.session.adjustSelected(adj);
      } catch (e) {
        this.showBanner((e as Error).message);
      }
    }
    this.redraw();
  }

  undo(): void {
    this.session.undo();
    this.redraw();
  }

  redo(): void {
    this.session.redo();
    this.redraw();
  }

  clear(): void {
    this.session.clear();
    this.redraw();
  }

  scaleSelected(factor: number): void {
    this.session.adjustSelected({ type: "scale", factor });
    this.redraw();
  }

  rotateSelected(deltaDeg: number): void {
    this.session.adjustSelected({ type: "rotate", deltaDeg });
    this.redraw();
  }

  async loadPreset(url: string): Promise<void> {
    const res = await fetch(url);
    const layout = parseLayout(await res.text());
    this.session.loadLayout(layout);
    this.redraw();
  }

  loadLayoutDocument(text: string): void {
    this.session.loadLayout(parseLayout(text));
    this.redraw();
  }

  setBackground(img: HTMLImageElement): void {
    this.background = img;
    this.session.backgroundImage = img;
    this.redraw();
  }

  async transfer(): Promise<void> {
    if (!this.session.canTransfer()) {
      this.showBanner("draw at least one shape first");
      return;
    }
    if (this.inFlight) {
      this.pendingTransfer = true; // debounce: latest request supersedes
      return;
    }
    this.inFlight = true;
    this.hideBanner();
    try {
      const blob = await this.api.infer(serializeLayout(this.session.layout));
      this.result.src = URL.createObjectURL(blob);
    } catch (e) {
      if (e instanceof ApiError && e.status === 503) {
        this.showBanner("model loading, try again shortly");
      } else {
        this.showBanner(`transfer failed: ${(e as Error).message}`);
      }
    } finally {
      this.inFlight = false;
      if (this.pendingTransfer) {
        this.pendingTransfer = false;
        void this.transfer();
      }
    }
  }

  async random(): Promise<void> {
    try {
      const sample = await this.api.random();
      this.session.loadLayout(parseLayout(JSON.stringify(sample.layout)));
      this.result.src = `data:image/png;base64,${sample.image_png_base64}`;
      this.redraw();
    } catch (e) {
      this.showBanner(
        e instanceof ApiError && e.status === 404
          ? "no stored samples on the server"
          : `random failed: ${(e as Error).message}`,
      );
    }
  }

  exportPair(half = 256): void {
    if (!this.background) {
      this.showBanner("upload a background image first");
      return;
    }
    let plan;
    try {
      plan = planPairExport(this.session.layout, half);
    } catch (e) {
      this.showBanner((e as Error).message);
      return;
    }
    const out = document.createElement("canvas");
    out.width = plan.totalWidth;
    out.height = plan.height;
    const ctx = out.getContext("2d")!;
    ctx.putImageData(rasterToImageData(plan.leftHalf), 0, 0);
    ctx.drawImage(this.background, plan.width, 0, plan.width, plan.height);
    const names = exportFilenames(new Date());
    out.toBlob((blob) => {
      if (blob) {
        this.download(URL.createObjectURL(blob), names.pair);
      }
    }, "image/png");
    const layoutBlob = new Blob([plan.layoutJson], { type: "application/json" });
    this.download(URL.createObjectURL(layoutBlob), names.layout);
  }

  private download(href: string, filename: string): void {
    const a = document.createElement("a");
    a.href = href;
    a.download = filename;
    a.click();
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
  }

  private redraw(): void {
    const ctx = this.canvas.getContext("2d")!;
    const { w, h } = this.session.layout.canvas;
    this.canvas.width = w;
    this.canvas.height = h;
    ctx.fillStyle = "#fff";
    ctx.fillRect(0, 0, w, h);
    if (this.session.mode === "annotate" && this.background) {
      ctx.globalAlpha = 0.55;
      ctx.drawImage(this.background, 0, 0, w, h);
      ctx.globalAlpha = 1.0;
    }
    if (this.session.shapes.length > 0) {
      ctx.putImageData(
        this.blend(rasterizeLayout(this.session.layout, w, h)),
        0,
        0,
      );
    }
    this.drawOverlay(ctx);
    const transferButton = this.controls.transfer as HTMLButtonElement | undefined;
    if (transferButton) {
      transferButton.disabled = !this.session.canTransfer();
    }
    const exportButton = this.controls.export as HTMLButtonElement | undefined;
    if (exportButton) {
      exportButton.disabled = !(
        this.session.mode === "annotate" && this.background && this.session.shapes.length > 0
      );
    }
  }

  // merge the stroke raster over the current canvas contents (keeps the
  // annotate background visible under the traced shapes)
  private blend(raster: ReturnType<typeof rasterizeLayout>): ImageData {
    const ctx = this.canvas.getContext("2d")!;
    const base = ctx.getImageData(0, 0, raster.width, raster.height);
    for (let i = 0; i < raster.pixels.length; i++) {
      const ink = 1 - raster.pixels[i];
      if (ink > 0) {
        const v = raster.pixels[i];
        base.data[i * 4] = Math.round(base.data[i * 4] * v);
        base.data[i * 4 + 1] = Math.round(base.data[i * 4 + 1] * v);
        base.data[i * 4 + 2] = Math.round(base.data[i * 4 + 2] * v);
      }
    }
    return base;
  }

  private drawOverlay(ctx: CanvasRenderingContext2D): void {
    if (this.drag?.kind === "create" && this.dragPreview) {
      const s = this.drag.start;
      const p = this.dragPreview;
      ctx.strokeStyle = "#4a90d9";
      ctx.setLineDash([4, 3]);
      ctx.strokeRect(
        Math.min(s.x, p.x),
        Math.min(s.y, p.y),
        Math.abs(p.x - s.x),
        Math.abs(p.y - s.y),
      );
      ctx.setLineDash([]);
    }
    if (this.session.selected !== null) {
      const shape = this.session.shapes[this.session.selected];
      if (shape) {
        ctx.strokeStyle = "#d94a4a";
        ctx.lineWidth = 1;
        ctx.strokeRect(shape.cx - shape.rx - 3, shape.cy - shape.ry - 3, 2 * shape.rx + 6, 2 * shape.ry + 6);
      }
    }
  }
}

export function bootstrap(): App {
  const canvas = document.getElementById("board") as HTMLCanvasElement;
  const result = document.getElementById("result") as HTMLImageElement;
  const banner = document.getElementById("banner") as HTMLElement;
  const controls: Record<string, HTMLElement> = {
    transfer: document.getElementById("transfer")!,
    export: document.getElementById("export")!,
  };
  const app = new App(canvas, result, banner, controls);

  const on = (id: string, fn: () => void) =>
    document.getElementById(id)?.addEventListener("click", fn);
  on("tool-circle", () => app.setTool("circle"));
  on("tool-oval", () => app.setTool("oval"));
  on("tool-select", () => app.setTool("select"));
  on("undo", () => app.undo());
  on("redo", () => app.redo());
  on("clear", () => app.clear());
  on("transfer", () => void app.transfer());
  on("random", () => void app.random());
  on("export", () => app.exportPair());
  on("scale-up", () => app.scaleSelected(1.1));
  on("scale-down", () => app.scaleSelected(1 / 1.1));
  on("rotate-cw", () => app.rotateSelected(10));
  on("rotate-ccw", () => app.rotateSelected(-10));

  const modeSelect = document.getElementById("mode") as HTMLSelectElement;
  modeSelect?.addEventListener("change", () =>
    app.setMode(modeSelect.value as "draw" | "annotate"),
  );
  const presetSelect = document.getElementById("preset") as HTMLSelectElement;
  presetSelect?.addEventListener("change", () => {
    if (presetSelect.value) {
      void app.loadPreset(`presets/${presetSelect.value}.json`);
    }
  });
  const upload = document.getElementById("upload") as HTMLInputElement;
  upload?.addEventListener("change", () => {
    const file = upload.files?.[0];
    if (!file) {
      return;
    }
    const img = new Image();
    img.onload = () => app.setBackground(img);
    img.src = URL.createObjectURL(file);
  });
  const layoutUpload = document.getElementById("layout-upload") as HTMLInputElement;
  layoutUpload?.addEventListener("change", async () => {
    const file = layoutUpload.files?.[0];
    if (file) {
      app.loadLayoutDocument(await file.text());
    }
  });
  return app;
}
