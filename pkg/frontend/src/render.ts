// Canvas painter for the scene primitives. All scene coordinates are field
// meters, +x toward the opponent goal, +y up; the canvas transform flips y.

import { FieldDims, Primitive } from "./scene";

const COLORS = {
  turf: "#14532d",
  lines: "#e7e5e4",
  ball: "#f97316",
  ours: "#3b82f6",
  theirs: "#eab308",
  selected: "#f8fafc",
  path: "rgba(148, 163, 184, 0.8)",
  contact: "#f97316",
};

const ROBOT_RADIUS = 0.09; // m
const BALL_RADIUS = 0.0215; // m

export class FieldRenderer {
  private ctx: CanvasRenderingContext2D;
  private canvas: HTMLCanvasElement;
  private margin = 0.45; // m of turf beyond the lines
  private dims: FieldDims = { length: 9, width: 6 };
  private heatCanvas: HTMLCanvasElement | null = null;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("no 2d canvas context");
    this.ctx = ctx;
  }

  private get scale(): number {
    const w = this.canvas.width / (this.dims.length + 2 * this.margin);
    const h = this.canvas.height / (this.dims.width + 2 * this.margin);
    return Math.min(w, h);
  }

  toScreen(x: number, y: number): [number, number] {
    const s = this.scale;
    return [this.canvas.width / 2 + x * s, this.canvas.height / 2 - y * s];
  }

  toField(px: number, py: number): [number, number] {
    const s = this.scale;
    return [(px - this.canvas.width / 2) / s, (this.canvas.height / 2 - py) / s];
  }

  draw(scene: Primitive[], stale: boolean): void {
    const ctx = this.ctx;
    for (const prim of scene) {
      if (prim.kind === "fieldLines") {
        this.dims = { length: prim.length, width: prim.width };
        break;
      }
    }
    ctx.fillStyle = COLORS.turf;
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    for (const prim of scene) {
      switch (prim.kind) {
        case "heatmap":
          this.drawHeatmap(prim);
          break;
        case "fieldLines":
          this.drawFieldLines(prim.length, prim.width);
          break;
        case "path":
          this.drawPath(prim.points);
          break;
        case "ball":
          this.drawBall(prim.x, prim.y);
          break;
        case "robot":
          this.drawRobot(prim);
          break;
      }
    }
    if (stale) {
      ctx.fillStyle = "rgba(15, 23, 42, 0.55)";
      ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    }
  }

  private drawFieldLines(length: number, width: number): void {
    const ctx = this.ctx;
    ctx.strokeStyle = COLORS.lines;
    ctx.lineWidth = 2;
    const [x0, y0] = this.toScreen(-length / 2, width / 2);
    const [x1, y1] = this.toScreen(length / 2, -width / 2);
    ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
    // halfway line and center circle
    const [cx0, cy0] = this.toScreen(0, width / 2);
    const [cx1, cy1] = this.toScreen(0, -width / 2);
    ctx.beginPath();
    ctx.moveTo(cx0, cy0);
    ctx.lineTo(cx1, cy1);
    ctx.stroke();
    ctx.beginPath();
    const [ox, oy] = this.toScreen(0, 0);
    ctx.arc(ox, oy, 0.5 * this.scale, 0, Math.PI * 2);
    ctx.stroke();
    // penalty areas and goals, mirrored
    for (const side of [-1, 1]) {
      const gx = (side * length) / 2;
      const [px0, py0] = this.toScreen(gx, 1.0);
      const [px1, py1] = this.toScreen(gx - side * 1.0, -1.0);
      ctx.strokeRect(Math.min(px0, px1), py0, Math.abs(px1 - px0), py1 - py0);
      const [gx0, gy0] = this.toScreen(gx, 0.5);
      const [gx1, gy1] = this.toScreen(gx + side * 0.18, -0.5);
      ctx.strokeRect(Math.min(gx0, gx1), gy0, Math.abs(gx1 - gx0), gy1 - gy0);
    }
  }

  private drawHeatmap(prim: Extract<Primitive, { kind: "heatmap" }>): void {
    // paint cells into a cols x rows offscreen canvas, then scale it up
    if (!this.heatCanvas) {
      this.heatCanvas = document.createElement("canvas");
    }
    const off = this.heatCanvas;
    off.width = prim.cols;
    off.height = prim.rows;
    const offCtx = off.getContext("2d");
    if (!offCtx) return;
    const image = offCtx.createImageData(prim.cols, prim.rows);
    for (let row = 0; row < prim.rows; row++) {
      for (let col = 0; col < prim.cols; col++) {
        const v = prim.cells[row * prim.cols + col];
        // image rows run top-down, field rows bottom-up
        const pixel = ((prim.rows - 1 - row) * prim.cols + col) * 4;
        image.data[pixel] = Math.round(255 * v);
        image.data[pixel + 1] = 40;
        image.data[pixel + 2] = Math.round(255 * (1 - v));
        image.data[pixel + 3] = 110;
      }
    }
    offCtx.putImageData(image, 0, 0);
    const [x0, y0] = this.toScreen(prim.origin[0], prim.origin[1] + prim.rows * prim.cellSize);
    const w = prim.cols * prim.cellSize * this.scale;
    const h = prim.rows * prim.cellSize * this.scale;
    this.ctx.imageSmoothingEnabled = false;
    this.ctx.drawImage(off, x0, y0, w, h);
  }

  private drawPath(points: [number, number][]): void {
    const ctx = this.ctx;
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    points.forEach(([x, y], i) => {
      const [sx, sy] = this.toScreen(x, y);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }

  private drawBall(x: number, y: number): void {
    const ctx = this.ctx;
    const [sx, sy] = this.toScreen(x, y);
    ctx.fillStyle = COLORS.ball;
    ctx.beginPath();
    ctx.arc(sx, sy, Math.max(3, BALL_RADIUS * this.scale), 0, Math.PI * 2);
    ctx.fill();
  }

  private drawRobot(prim: Extract<Primitive, { kind: "robot" }>): void {
    const ctx = this.ctx;
    const [sx, sy] = this.toScreen(prim.x, prim.y);
    const r = ROBOT_RADIUS * this.scale;
    ctx.fillStyle = prim.team === "ours" ? COLORS.ours : COLORS.theirs;
    ctx.beginPath();
    ctx.arc(sx, sy, r, 0, Math.PI * 2);
    ctx.fill();
    if (prim.selected) {
      ctx.strokeStyle = COLORS.selected;
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.arc(sx, sy, r + 3, 0, Math.PI * 2);
      ctx.stroke();
    }
    if (prim.ballContact) {
      ctx.strokeStyle = COLORS.contact;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(sx, sy, r + 1, 0, Math.PI * 2);
      ctx.stroke();
    }
    // heading tick
    const [hx, hy] = this.toScreen(
      prim.x + ROBOT_RADIUS * 1.4 * Math.cos(prim.yaw),
      prim.y + ROBOT_RADIUS * 1.4 * Math.sin(prim.yaw),
    );
    ctx.strokeStyle = "#0f172a";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(sx, sy);
    ctx.lineTo(hx, hy);
    ctx.stroke();
    ctx.fillStyle = COLORS.lines;
    ctx.font = "11px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(prim.label, sx, sy - r - 5);
  }
}
