// Pure scene construction: snapshot -> drawing primitives in field meters.
// Keeping this canvas-free makes the renderer testable without a browser.

import { StateSnapshot } from "./types";

export interface FieldDims {
  length: number;
  width: number;
}

export type Primitive =
  | { kind: "fieldLines"; length: number; width: number }
  | {
      kind: "heatmap";
      origin: [number, number];
      cellSize: number;
      cols: number;
      rows: number;
      cells: number[]; // normalized 0..1, row-major
    }
  | { kind: "path"; robotId: number; points: [number, number][] }
  | { kind: "ball"; x: number; y: number }
  | {
      kind: "robot";
      x: number;
      y: number;
      yaw: number;
      team: "ours" | "theirs";
      id: number;
      label: string;
      selected: boolean;
      ballContact: boolean;
    };

export interface ViewOptions {
  heatmap: boolean;
  selectedRobot: number | null;
}

export const DEFAULT_FIELD: FieldDims = { length: 9, width: 6 };

export function fieldDims(snapshot: StateSnapshot | null): FieldDims {
  if (snapshot?.grid) {
    const g = snapshot.grid;
    return { length: g.cols * g.cell_size, width: g.rows * g.cell_size };
  }
  return DEFAULT_FIELD;
}

function normalizeScores(scores: number[]): number[] {
  let min = Infinity;
  let max = -Infinity;
  for (const s of scores) {
    if (s < min) min = s;
    if (s > max) max = s;
  }
  if (!(max > min)) return scores.map(() => 0.5);
  const span = max - min;
  return scores.map((s) => (s - min) / span);
}

export function buildScene(snapshot: StateSnapshot | null, view: ViewOptions): Primitive[] {
  const dims = fieldDims(snapshot);
  const scene: Primitive[] = [];
  if (snapshot && view.heatmap && snapshot.grid) {
    const g = snapshot.grid;
    scene.push({
      kind: "heatmap",
      origin: g.origin,
      cellSize: g.cell_size,
      cols: g.cols,
      rows: g.rows,
      cells: normalizeScores(g.scores),
    });
  }
  scene.push({ kind: "fieldLines", length: dims.length, width: dims.width });
  if (!snapshot) {
    return scene;
  }
  for (const [rid, points] of Object.entries(snapshot.paths)) {
    if (points.length >= 2) {
      scene.push({ kind: "path", robotId: Number(rid), points });
    }
  }
  scene.push({ kind: "ball", x: snapshot.ball.x, y: snapshot.ball.y });
  for (const robot of snapshot.robots) {
    const role = robot.role ? ` ${robot.role}` : "";
    scene.push({
      kind: "robot",
      x: robot.x,
      y: robot.y,
      yaw: robot.yaw,
      team: robot.team,
      id: robot.id,
      label: `${robot.id}${role}`,
      selected: robot.team === "ours" && robot.id === view.selectedRobot,
      ballContact: robot.ball_contact,
    });
  }
  return scene;
}

export function robotAt(
  snapshot: StateSnapshot | null,
  x: number,
  y: number,
  radius = 0.3,
): number | null {
  // nearest friendly robot within radius, for click selection
  if (!snapshot) return null;
  let best: number | null = null;
  let bestDist = radius;
  for (const robot of snapshot.robots) {
    if (robot.team !== "ours") continue;
    const d = Math.hypot(robot.x - x, robot.y - y);
    if (d < bestDist) {
      bestDist = d;
      best = robot.id;
    }
  }
  return best;
}
