// Message schema shared with the engine gateway (see gateway.py).

export interface BallView {
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface RobotView {
  team: "ours" | "theirs";
  id: number;
  x: number;
  y: number;
  yaw: number;
  vx: number;
  vy: number;
  vyaw: number;
  ball_contact: boolean;
  role: string | null;
  slot: number | null;
}

export interface CommandView {
  vx: number;
  vy: number;
  vtheta: number;
  kick: number;
  dribble: number;
}

export interface GridView {
  origin: [number, number];
  cell_size: number;
  cols: number;
  rows: number;
  scores: number[]; // row-major: index = row * cols + col
}

export interface EventView {
  tick: number;
  kind: string;
  subjects: string[];
}

export interface StateSnapshot {
  frame_id: number;
  timestamp: number;
  phase: string;
  tick_elapsed_ms: number;
  overrun: boolean;
  ball: BallView;
  robots: RobotView[];
  commands: Record<string, CommandView>;
  paths: Record<string, [number, number][]>;
  grid: GridView | null;
  events: EventView[];
  errors: Record<string, string>;
}

export type OperatorCommand =
  | { kind: "REFEREE"; command: string }
  | {
      kind: "MANUAL_DRIVE";
      robot_id: number;
      vx?: number;
      vy?: number;
      vtheta?: number;
      kick?: number;
      dribble?: number;
      release?: boolean;
    }
  | { kind: "PARAM_SET"; name: string; value: number }
  | { kind: "SIM_CONTROL"; action: "pause" | "resume" | "step" };

export type ServerMessage =
  | { type: "snapshot"; data: StateSnapshot }
  | { type: "ack"; ok: boolean; reason: string | null };

export function isValidSnapshot(data: unknown): data is StateSnapshot {
  if (typeof data !== "object" || data === null) return false;
  const s = data as Record<string, unknown>;
  return (
    typeof s.frame_id === "number" &&
    typeof s.phase === "string" &&
    typeof s.ball === "object" &&
    s.ball !== null &&
    Array.isArray(s.robots) &&
    typeof s.commands === "object" &&
    s.commands !== null
  );
}
