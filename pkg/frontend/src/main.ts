import "./style.css";
import { GatewayClient, gatewayUrl, ConnectionStatus } from "./client";
import { CommandSender, keysToVelocity } from "./controls";
import { buildScene, robotAt } from "./scene";
import { FieldRenderer } from "./render";
import { StateSnapshot } from "./types";

const REFEREE_BUTTONS = [
  "HALT",
  "STOP",
  "FORCE_START",
  "NORMAL_START",
  "PREPARE_KICKOFF_US",
  "PREPARE_KICKOFF_THEM",
];

const PARAM_SLIDERS: [string, number, number, number, number][] = [
  // name, min, max, step, default
  ["v_max", 0.5, 4.0, 0.1, 3.0],
  ["a_max", 0.5, 6.0, 0.1, 2.5],
  ["v_cut", 0.05, 1.0, 0.05, 0.3],
  ["yaw_kp", 0.0, 10.0, 0.5, 4.0],
];

interface ViewState {
  snapshot: StateSnapshot | null;
  selectedRobot: number | null;
  heatmap: boolean;
  status: ConnectionStatus;
  lastAck: string;
  banner: string | null;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function main(): void {
  const state: ViewState = {
    snapshot: null,
    selectedRobot: null,
    heatmap: false,
    status: "disconnected",
    lastAck: "",
    banner: null,
  };

  const canvas = el<HTMLCanvasElement>("field");
  const renderer = new FieldRenderer(canvas);

  const client = new GatewayClient(gatewayUrl(window.location), {
    onSnapshot: (snapshot) => {
      state.snapshot = snapshot;
      state.banner = null;
      updateSidebar();
    },
    onAck: (ok, reason) => {
      state.lastAck = ok ? "ok" : `rejected: ${reason}`;
      updateSidebar();
    },
    onStatus: (status) => {
      state.status = status;
      updateSidebar();
    },
    onInvalid: (reason) => {
      // keep rendering the last good frame
      state.banner = reason;
      updateSidebar();
    },
  });
  const sender = new CommandSender(client);
  client.connect();

  // referee buttons
  const refereeBox = el<HTMLDivElement>("referee");
  for (const command of REFEREE_BUTTONS) {
    const button = document.createElement("button");
    button.textContent = command.replaceAll("_", " ");
    button.dataset.command = command;
    button.addEventListener("click", () => sender.referee(command));
    refereeBox.appendChild(button);
  }

  // sim controls
  for (const action of ["pause", "resume", "step"] as const) {
    el<HTMLButtonElement>(`sim-${action}`).addEventListener("click", () =>
      sender.simControl(action),
    );
  }

  // parameter sliders: send on commit, not on every input event
  const paramBox = el<HTMLDivElement>("params");
  for (const [name, min, max, step, start] of PARAM_SLIDERS) {
    const row = document.createElement("label");
    row.className = "param";
    const text = document.createElement("span");
    text.textContent = `${name} = ${start}`;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(min);
    slider.max = String(max);
    slider.step = String(step);
    slider.value = String(start);
    slider.addEventListener("input", () => {
      text.textContent = `${name} = ${slider.value}`;
    });
    slider.addEventListener("change", () => {
      sender.paramSet(name, Number(slider.value));
    });
    row.append(text, slider);
    paramBox.appendChild(row);
  }

  el<HTMLInputElement>("heatmap-toggle").addEventListener("change", (event) => {
    state.heatmap = (event.target as HTMLInputElement).checked;
  });

  // robot selection by clicking the field
  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const [fx, fy] = renderer.toField(
      ((event.clientX - rect.left) * canvas.width) / rect.width,
      ((event.clientY - rect.top) * canvas.height) / rect.height,
    );
    const hit = robotAt(state.snapshot, fx, fy);
    if (state.selectedRobot !== null && hit === null) {
      sender.release(state.selectedRobot);
    }
    state.selectedRobot = hit;
    updateSidebar();
  });

  el<HTMLButtonElement>("release").addEventListener("click", () => {
    if (state.selectedRobot !== null) {
      sender.release(state.selectedRobot);
      state.selectedRobot = null;
      updateSidebar();
    }
  });

  // keyboard manual drive for the selected robot, resent at the key-repeat
  // pace but capped by the sender's 10 Hz limit
  const keysDown = new Set<string>();
  const driveKeys = new Set([
    "ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight", "w", "a", "s", "d", "q", "e",
  ]);
  window.addEventListener("keydown", (event) => {
    if (!driveKeys.has(event.key) || state.selectedRobot === null) return;
    event.preventDefault();
    keysDown.add(event.key);
  });
  window.addEventListener("keyup", (event) => {
    if (!driveKeys.has(event.key)) return;
    keysDown.delete(event.key);
    if (state.selectedRobot !== null && keysDown.size === 0) {
      sender.manualDrive(state.selectedRobot, { vx: 0, vy: 0, vtheta: 0 });
    }
  });
  setInterval(() => {
    if (state.selectedRobot !== null && keysDown.size > 0) {
      sender.manualDrive(state.selectedRobot, keysToVelocity(keysDown));
    }
  }, 50);

  function updateSidebar(): void {
    const pill = el<HTMLSpanElement>("status");
    pill.textContent = state.status;
    pill.className = `pill ${state.status}`;
    el<HTMLSpanElement>("phase").textContent = state.snapshot?.phase ?? "-";
    el<HTMLSpanElement>("frame").textContent = String(state.snapshot?.frame_id ?? "-");
    el<HTMLSpanElement>("tickms").textContent = state.snapshot
      ? state.snapshot.tick_elapsed_ms.toFixed(2)
      : "-";
    el<HTMLSpanElement>("selected").textContent =
      state.selectedRobot === null ? "none (click a blue robot)" : `robot ${state.selectedRobot}`;
    el<HTMLSpanElement>("ack").textContent = state.lastAck;
    const bannerBox = el<HTMLDivElement>("banner");
    const bannerText = state.banner ?? (client.isStale() && state.snapshot ? "STALE FEED" : null);
    bannerBox.textContent = bannerText ?? "";
    bannerBox.style.display = bannerText ? "block" : "none";
    const events = el<HTMLUListElement>("events");
    events.replaceChildren(
      ...(state.snapshot?.events ?? []).slice(-12).reverse().map((event) => {
        const item = document.createElement("li");
        item.textContent = `${event.tick} ${event.kind} ${event.subjects.join(" ")}`;
        return item;
      }),
    );
    // buttons disabled while disconnected
    document
      .querySelectorAll<HTMLButtonElement>("button")
      .forEach((b) => (b.disabled = state.status !== "connected"));
  }

  function frame(): void {
    renderer.draw(
      buildScene(state.snapshot, {
        heatmap: state.heatmap,
        selectedRobot: state.selectedRobot,
      }),
      client.isStale(),
    );
    requestAnimationFrame(frame);
  }
  updateSidebar();
  requestAnimationFrame(frame);
}

window.addEventListener("load", main);
