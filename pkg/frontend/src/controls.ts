// Operator actions -> gateway messages. Manual drive is rate-limited to
// 10 Hz; everything else sends immediately.

import { GatewayClient } from "./client";
import { OperatorCommand } from "./types";

export const MANUAL_DRIVE_MIN_INTERVAL_MS = 100;
export const DRIVE_SPEED = 1.0; // m/s for keyboard driving
export const DRIVE_YAW_RATE = 2.0; // rad/s

export interface Velocity {
  vx: number;
  vy: number;
  vtheta: number;
}

export function keysToVelocity(keys: Set<string>): Velocity {
  // robot-local: forward = +vx, left = +vy; diagonals normalized to unit speed
  let vx = 0;
  let vy = 0;
  if (keys.has("ArrowUp") || keys.has("w")) vx += 1;
  if (keys.has("ArrowDown") || keys.has("s")) vx -= 1;
  if (keys.has("ArrowLeft") || keys.has("a")) vy += 1;
  if (keys.has("ArrowRight") || keys.has("d")) vy -= 1;
  const norm = Math.hypot(vx, vy);
  if (norm > 0) {
    vx = (vx / norm) * DRIVE_SPEED;
    vy = (vy / norm) * DRIVE_SPEED;
  }
  let vtheta = 0;
  if (keys.has("q")) vtheta += DRIVE_YAW_RATE;
  if (keys.has("e")) vtheta -= DRIVE_YAW_RATE;
  return { vx, vy, vtheta };
}

export class CommandSender {
  private client: Pick<GatewayClient, "send" | "connected">;
  private now: () => number;
  private lastDriveAt = -Infinity;
  lastError: string | null = null;

  constructor(client: Pick<GatewayClient, "send" | "connected">, now: () => number = Date.now) {
    this.client = client;
    this.now = now;
  }

  private push(command: OperatorCommand): boolean {
    if (!this.client.connected) {
      this.lastError = "not connected";
      return false;
    }
    const ok = this.client.send(command);
    this.lastError = ok ? null : "send failed";
    return ok;
  }

  referee(command: string): boolean {
    return this.push({ kind: "REFEREE", command });
  }

  paramSet(name: string, value: number): boolean {
    return this.push({ kind: "PARAM_SET", name, value });
  }

  simControl(action: "pause" | "resume" | "step"): boolean {
    return this.push({ kind: "SIM_CONTROL", action });
  }

  manualDrive(robotId: number, velocity: Velocity): boolean {
    const now = this.now();
    if (now - this.lastDriveAt < MANUAL_DRIVE_MIN_INTERVAL_MS) {
      return false; // rate limited, caller retries on the next key repeat
    }
    const sent = this.push({
      kind: "MANUAL_DRIVE",
      robot_id: robotId,
      vx: velocity.vx,
      vy: velocity.vy,
      vtheta: velocity.vtheta,
    });
    if (sent) {
      this.lastDriveAt = now;
    }
    return sent;
  }

  release(robotId: number): boolean {
    // releasing control must never be rate limited
    return this.push({ kind: "MANUAL_DRIVE", robot_id: robotId, release: true });
  }
}
