import { describe, expect, it, vi } from "vitest";

import { GatewayClient, gatewayUrl } from "../src/client";
import { StateSnapshot } from "../src/types";

function minimalSnapshot(frame = 1): StateSnapshot {
  return {
    frame_id: frame,
    timestamp: 0,
    phase: "STOP",
    tick_elapsed_ms: 1,
    overrun: false,
    ball: { x: 0, y: 0, vx: 0, vy: 0 },
    robots: [],
    commands: {},
    paths: {},
    grid: null,
    events: [],
    errors: {},
  };
}

describe("GatewayClient message handling", () => {
  it("dispatches valid snapshots", () => {
    const onSnapshot = vi.fn();
    const client = new GatewayClient("ws://x", { onSnapshot });
    client.handleMessage(JSON.stringify({ type: "snapshot", data: minimalSnapshot(7) }));
    expect(onSnapshot).toHaveBeenCalledOnce();
    expect(onSnapshot.mock.calls[0][0].frame_id).toBe(7);
  });

  it("keeps the last good frame on an invalid snapshot", () => {
    const onSnapshot = vi.fn();
    const onInvalid = vi.fn();
    const client = new GatewayClient("ws://x", { onSnapshot, onInvalid });
    client.handleMessage(JSON.stringify({ type: "snapshot", data: minimalSnapshot(1) }));
    client.handleMessage(JSON.stringify({ type: "snapshot", data: { nope: true } }));
    client.handleMessage("{ not even json");
    expect(onSnapshot).toHaveBeenCalledOnce();
    expect(onInvalid).toHaveBeenCalledTimes(2);
  });

  it("dispatches acks", () => {
    const onAck = vi.fn();
    const client = new GatewayClient("ws://x", { onAck });
    client.handleMessage(JSON.stringify({ type: "ack", ok: false, reason: "nope" }));
    expect(onAck).toHaveBeenCalledWith(false, "nope");
  });

  it("reports staleness until a snapshot arrives and after a quiet second", () => {
    const client = new GatewayClient("ws://x", {});
    const t0 = 1_000_000;
    expect(client.isStale(t0)).toBe(true);
    vi.spyOn(Date, "now").mockReturnValue(t0);
    client.handleMessage(JSON.stringify({ type: "snapshot", data: minimalSnapshot() }));
    expect(client.isStale(t0 + 100)).toBe(false);
    expect(client.isStale(t0 + 1500)).toBe(true);
    vi.restoreAllMocks();
  });
});

describe("gatewayUrl", () => {
  it("uses the page host by default and honors query overrides", () => {
    const base = { protocol: "http:", host: "localhost:8080", search: "" } as Location;
    expect(gatewayUrl(base)).toBe("ws://localhost:8080/ws");
    const custom = {
      protocol: "https:",
      host: "ui.example",
      search: "?host=engine.example:9000&token=abc",
    } as Location;
    expect(gatewayUrl(custom)).toBe("wss://engine.example:9000/ws?token=abc");
  });
});
