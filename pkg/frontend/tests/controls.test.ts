import { describe, expect, it } from "vitest";

import { CommandSender, keysToVelocity, MANUAL_DRIVE_MIN_INTERVAL_MS } from "../src/controls";
import { OperatorCommand } from "../src/types";

class MockGateway {
  sent: OperatorCommand[] = [];
  connected = true;
  send(command: OperatorCommand): boolean {
    if (!this.connected) return false;
    this.sent.push(command);
    return true;
  }
}

describe("CommandSender", () => {
  it("maps referee buttons straight to REFEREE messages", () => {
    const gw = new MockGateway();
    const sender = new CommandSender(gw);
    expect(sender.referee("HALT")).toBe(true);
    expect(gw.sent).toEqual([{ kind: "REFEREE", command: "HALT" }]);
  });

  it("maps slider commits to PARAM_SET", () => {
    const gw = new MockGateway();
    new CommandSender(gw).paramSet("v_max", 2.0);
    expect(gw.sent).toEqual([{ kind: "PARAM_SET", name: "v_max", value: 2.0 }]);
  });

  it("maps sim controls", () => {
    const gw = new MockGateway();
    new CommandSender(gw).simControl("pause");
    expect(gw.sent).toEqual([{ kind: "SIM_CONTROL", action: "pause" }]);
  });

  it("rate-limits manual drive to ten per second", () => {
    const gw = new MockGateway();
    let clock = 1000;
    const sender = new CommandSender(gw, () => clock);
    const v = { vx: 1, vy: 0, vtheta: 0 };
    expect(sender.manualDrive(3, v)).toBe(true);
    clock += MANUAL_DRIVE_MIN_INTERVAL_MS - 1;
    expect(sender.manualDrive(3, v)).toBe(false);
    clock += 1;
    expect(sender.manualDrive(3, v)).toBe(true);
    expect(gw.sent.filter((c) => c.kind === "MANUAL_DRIVE")).toHaveLength(2);
  });

  it("release bypasses the rate limit", () => {
    const gw = new MockGateway();
    let clock = 0;
    const sender = new CommandSender(gw, () => clock);
    sender.manualDrive(3, { vx: 1, vy: 0, vtheta: 0 });
    expect(sender.release(3)).toBe(true);
    const last = gw.sent.at(-1);
    expect(last).toEqual({ kind: "MANUAL_DRIVE", robot_id: 3, release: true });
  });

  it("refuses to send while disconnected and reports it", () => {
    const gw = new MockGateway();
    gw.connected = false;
    const sender = new CommandSender(gw);
    expect(sender.referee("STOP")).toBe(false);
    expect(sender.lastError).toBe("not connected");
    expect(gw.sent).toHaveLength(0);
  });
});

describe("keysToVelocity", () => {
  it("maps single arrows to unit axis speeds", () => {
    expect(keysToVelocity(new Set(["ArrowUp"]))).toEqual({ vx: 1, vy: 0, vtheta: 0 });
    expect(keysToVelocity(new Set(["ArrowLeft"]))).toEqual({ vx: 0, vy: 1, vtheta: 0 });
  });

  it("normalizes diagonals to unit speed", () => {
    const v = keysToVelocity(new Set(["ArrowUp", "ArrowLeft"]));
    expect(Math.hypot(v.vx, v.vy)).toBeCloseTo(1.0, 9);
    expect(v.vx).toBeCloseTo(Math.SQRT1_2, 9);
  });

  it("opposing keys cancel", () => {
    const v = keysToVelocity(new Set(["ArrowUp", "ArrowDown"]));
    expect(v).toEqual({ vx: 0, vy: 0, vtheta: 0 });
  });

  it("q and e spin", () => {
    expect(keysToVelocity(new Set(["q"])).vtheta).toBeGreaterThan(0);
    expect(keysToVelocity(new Set(["e"])).vtheta).toBeLessThan(0);
  });
});
