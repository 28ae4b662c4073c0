"""Operator gateway: publishes engine state snapshots over a websocket and
feeds operator commands back into the engine between ticks.

The engine never blocks on this layer. Each tick it publishes one immutable
snapshot dict into the SnapshotBus (a lock-guarded slot); websocket sessions
poll the bus at the configured decimation rate and push the newest snapshot.
Commands arrive as JSON messages and are queued into the engine's inboxes,
which the tick loop drains atomically between ticks.

Wire schema (all messages JSON):
  server -> client   {"type": "snapshot", "data": StateSnapshot}
                     {"type": "ack", "ok": bool, "reason": str | null}
  client -> server   {"kind": "REFEREE", "command": "FORCE_START"}
                     {"kind": "MANUAL_DRIVE", "robot_id": 3, "vx": 0.0,
                      "vy": 0.0, "vtheta": 0.0, "kick": 0, "dribble": 0}
                     {"kind": "MANUAL_DRIVE", "robot_id": 3, "release": true}
                     {"kind": "PARAM_SET", "name": "v_max", "value": 2.0}
                     {"kind": "SIM_CONTROL", "action": "pause" | "resume" | "step"}

StateSnapshot:
  frame_id, timestamp, phase, tick_elapsed_ms, overrun,
  ball {x, y, vx, vy},
  robots [{team, id, x, y, yaw, vx, vy, vyaw, ball_contact, role, slot}],
  commands {id: {vx, vy, vtheta, kick, dribble}},
  paths {id: [[x, y], ...]},
  grid {origin: [x, y], cell_size, cols, rows, scores: row-major} | null,
  events [{tick, kind, subjects}],
  errors {id: message}
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
import threading
from typing import TYPE_CHECKING

from aiohttp import WSMsgType, web

from .config import TUNABLE_PARAMS
from .engine import Engine, EngineTickReport
from .motion import RobotCommand
from .world import RefereeCommand, Team, WorldFrame

if TYPE_CHECKING:
    from .runner import EngineRunner

logger = logging.getLogger(__name__)


class SnapshotBus:
    """Latest-snapshot slot. Publishing is a constant-time assignment under
    a lock, so a slow or absent consumer can never delay the engine."""

    def __init__(self):
        self._lock = threading.Lock()
        self._snapshot: dict | None = None
        self._version = 0

    def publish(self, snapshot: dict):
        with self._lock:
            self._snapshot = snapshot
            self._version += 1

    def latest(self) -> tuple[int, dict | None]:
        with self._lock:
            return self._version, self._snapshot


def build_snapshot(report: EngineTickReport, world: WorldFrame,
                   events: list | None = None) -> dict:
    """JSON-ready snapshot of one tick; the world is the frame the commands
    were computed from."""
    robots = []
    for r in world.robots:
        role = report.assignment.role_of(r.id) if r.team is Team.OURS else None
        robots.append({
            "team": r.team.value,
            "id": r.id,
            "x": r.position.x, "y": r.position.y, "yaw": r.yaw,
            "vx": r.velocity.x, "vy": r.velocity.y, "vyaw": r.yaw_rate,
            "ball_contact": r.ball_contact,
            "role": role[0].value if role else None,
            "slot": role[1] if role else None,
        })
    grid = None
    if report.grid is not None:
        spec = report.grid.spec
        grid = {
            "origin": [spec.origin.x, spec.origin.y],
            "cell_size": spec.cell_size,
            "cols": spec.cols,
            "rows": spec.rows,
            "scores": report.grid.to_row_major(),
        }
    return {
        "frame_id": report.frame_id,
        "timestamp": world.timestamp,
        "phase": report.phase.value,
        "tick_elapsed_ms": report.elapsed * 1e3,
        "overrun": report.overrun,
        "ball": {"x": world.ball.position.x, "y": world.ball.position.y,
                 "vx": world.ball.velocity.x, "vy": world.ball.velocity.y},
        "robots": robots,
        "commands": {
            str(rid): {"vx": c.vx, "vy": c.vy, "vtheta": c.vtheta,
                       "kick": c.kick_power, "dribble": c.dribble_power}
            for rid, c in report.commands.items()
        },
        "paths": {
            str(rid): [[p.x, p.y] for p in path.waypoints]
            for rid, path in report.paths.items()
        },
        "grid": grid,
        "events": [
            {"tick": e.tick, "kind": e.kind.value, "subjects": list(e.subjects)}
            for e in (events or [])
        ],
        "errors": {str(rid): msg for rid, msg in report.errors.items()},
    }


def apply_operator_command(engine: Engine, runner: "EngineRunner | None",
                           payload: dict) -> dict:
    """Validate one operator message and queue its effect; returns the ack."""
    try:
        kind = payload.get("kind")
        if kind == "REFEREE":
            command = RefereeCommand(payload["command"])
            engine.post_referee(command)
        elif kind == "MANUAL_DRIVE":
            robot_id = int(payload["robot_id"])
            if payload.get("release"):
                engine.post_operator(lambda e: e.set_manual(robot_id, None))
            else:
                vx = float(payload.get("vx", 0.0))
                vy = float(payload.get("vy", 0.0))
                vtheta = float(payload.get("vtheta", 0.0))
                if not all(math.isfinite(v) for v in (vx, vy, vtheta)):
                    raise ValueError("non-finite velocity")
                kick = min(max(int(payload.get("kick", 0)), 0), 100)
                dribble = min(max(int(payload.get("dribble", 0)), 0), 100)
                cmd = RobotCommand(vx, vy, vtheta, kick, dribble)
                engine.post_operator(lambda e: e.set_manual(robot_id, cmd))
        elif kind == "PARAM_SET":
            name = payload["name"]
            value = float(payload["value"])
            if name not in TUNABLE_PARAMS:
                raise ValueError(f"unknown parameter {name!r}")
            if not math.isfinite(value):
                raise ValueError("parameter value must be finite")
            engine.post_operator(lambda e: e.set_param(name, value))
        elif kind == "SIM_CONTROL":
            if runner is None or runner.mode != "sim":
                raise ValueError("no simulator attached")
            action = payload["action"]
            if action == "pause":
                runner.pause()
            elif action == "resume":
                runner.resume()
            elif action == "step":
                runner.step_once()
            else:
                raise ValueError(f"unknown sim action {action!r}")
        else:
            raise ValueError(f"unknown command kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        return {"type": "ack", "ok": False, "reason": str(exc)}
    return {"type": "ack", "ok": True, "reason": None}


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>playmaker</title></head>
<body><h1>playmaker engine</h1>
<p>The operator console bundle is not built. The websocket endpoint is at
<code>/ws</code>; see the repository README for the message schema.</p>
</body></html>
"""


class Gateway:
    """HTTP + websocket server bridging the operator UI to a live engine."""

    def __init__(
        self,
        engine: Engine,
        bus: SnapshotBus,
        runner: "EngineRunner | None" = None,
        host: str = "127.0.0.1",
        port: int = 8080,
        token: str = "",
        snapshot_hz: float = 30.0,
        static_dir: str | None = None,
    ):
        self.engine = engine
        self.bus = bus
        self.runner = runner
        self.host = host
        self.port = port
        self.token = token
        self.snapshot_period = 1.0 / max(snapshot_hz, 1.0)
        self.static_dir = static_dir
        self._thread: threading.Thread | None = None
        self._loop: asyncio.AbstractEventLoop | None = None
        self._started = threading.Event()
        self.bound_port: int | None = None

    # -- aiohttp handlers -----------------------------------------------------

    async def _index(self, request: web.Request) -> web.Response:
        if self.static_dir:
            index = f"{self.static_dir}/index.html"
            try:
                with open(index, encoding="utf-8") as fh:
                    return web.Response(text=fh.read(), content_type="text/html")
            except OSError:
                pass
        return web.Response(text=_FALLBACK_PAGE, content_type="text/html")

    async def _healthz(self, request: web.Request) -> web.Response:
        version, snap = self.bus.latest()
        return web.json_response({
            "ok": True,
            "snapshot_version": version,
            "frame_id": snap["frame_id"] if snap else None,
        })

    async def _ws(self, request: web.Request) -> web.WebSocketResponse:
        if self.token and request.query.get("token") != self.token:
            raise web.HTTPUnauthorized(reason="bad or missing token")
        ws = web.WebSocketResponse(heartbeat=30.0)
        await ws.prepare(request)
        sender = asyncio.create_task(self._push_snapshots(ws))
        try:
            async for msg in ws:
                if msg.type != WSMsgType.TEXT:
                    continue
                try:
                    payload = json.loads(msg.data)
                except json.JSONDecodeError as exc:
                    await ws.send_json({"type": "ack", "ok": False,
                                        "reason": f"bad json: {exc}"})
                    continue
                await ws.send_json(apply_operator_command(self.engine, self.runner, payload))
        finally:
            sender.cancel()
        return ws

    async def _push_snapshots(self, ws: web.WebSocketResponse):
        last_version = -1
        while not ws.closed:
            version, snapshot = self.bus.latest()
            if snapshot is not None and version != last_version:
                last_version = version
                try:
                    await ws.send_json({"type": "snapshot", "data": snapshot})
                except ConnectionError:
                    return
            await asyncio.sleep(self.snapshot_period)

    def _build_app(self) -> web.Application:
        app = web.Application()
        app.router.add_get("/", self._index)
        app.router.add_get("/healthz", self._healthz)
        app.router.add_get("/ws", self._ws)
        if self.static_dir:
            app.router.add_static("/assets", f"{self.static_dir}/assets",
                                  show_index=False)
        return app

    # -- lifecycle -------------------------------------------------------------

    def start(self):
        self._thread = threading.Thread(target=self._serve, name="gateway", daemon=True)
        self._thread.start()
        if not self._started.wait(timeout=10.0):
            raise RuntimeError("gateway failed to start")

    def _serve(self):
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        self._loop = loop

        async def main():
            runner = web.AppRunner(self._build_app())
            await runner.setup()
            site = web.TCPSite(runner, self.host, self.port)
            await site.start()
            server = site._server  # bound socket, for ephemeral port discovery
            self.bound_port = server.sockets[0].getsockname()[1]
            self._started.set()
            try:
                while True:
                    await asyncio.sleep(3600)
            except asyncio.CancelledError:
                await runner.cleanup()
                raise

        task = loop.create_task(main())
        try:
            loop.run_until_complete(task)
        except asyncio.CancelledError:
            pass
        finally:
            loop.close()

    def stop(self):
        if self._loop is None:
            return
        for task in asyncio.all_tasks(self._loop):
            self._loop.call_soon_threadsafe(task.cancel)
        if self._thread is not None:
            self._thread.join(timeout=5.0)
