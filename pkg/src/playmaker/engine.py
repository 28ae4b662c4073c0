"""Frame-driven engine: packet decoding, the per-frame pipeline, and the
latest-wins mailbox that connects receivers to the tick loop.

Every vision frame triggers one tick: strategy, role skills, path planning,
motion control, and radio encoding run in order inside the frame budget.
A downstream failure for one robot degrades to a fail-safe zero command and
an entry in the tick report; the other robots are unaffected.

Vision packets are newline-separated text, one packet per frame:
    F <frame_id> <timestamp>
    B <x> <y> <vx> <vy>
    R <us|them> <id> <x> <y> <yaw> <vx> <vy> <vyaw>
Referee packets are one uppercase token (HALT, STOP, FORCE_START, ...).
The wire carries no ball-contact flag (the detector is on the robot and
there is no uplink), so decoded frames default it to False; the simulator
supplies contact directly.
"""

from __future__ import annotations

import logging
import socket
import threading
import time
from collections import Counter
from dataclasses import dataclass, field

from .config import EngineConfig, set_param
from .motion import ZERO_COMMAND, RobotCommand, clamp_command, compute_command
from .pathplan import PathBlocked, PathPolyline, plan_path
from .potential import GridSpec, PotentialGrid, build_mask, combine_masks
from .radio import encode_serial_frame, encode_udp_csv
from .strategy import (
    RoleAssignment,
    RoleKind,
    assign_roles,
    run_role,
    select_role_set,
)
from .world import (
    BallState,
    GamePhase,
    Pose,
    RefereeCommand,
    RobotState,
    Team,
    Vec2,
    WorldFrame,
    update_phase,
    wrap_angle,
)

logger = logging.getLogger(__name__)

# roles whose skill reads the pass grid
GRID_ROLES = {RoleKind.ATTACKER, RoleKind.PASS_RECEIVER, RoleKind.WAITER}


class VisionDecodeError(ValueError):
    pass


def decode_vision_packet(data: bytes | str) -> WorldFrame:
    """Parse one vision packet; errors carry the offending line number."""
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    frame_id = None
    timestamp = 0.0
    ball = None
    robots: list[RobotState] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "F":
                if len(parts) != 3:
                    raise ValueError("F needs frame_id and timestamp")
                frame_id = int(parts[1])
                timestamp = float(parts[2])
            elif tag == "B":
                if len(parts) != 5:
                    raise ValueError("B needs x y vx vy")
                x, y, vx, vy = map(float, parts[1:])
                ball = BallState(Vec2(x, y), Vec2(vx, vy))
            elif tag == "R":
                if len(parts) != 9:
                    raise ValueError("R needs team id x y yaw vx vy vyaw")
                team = {"us": Team.OURS, "them": Team.THEIRS}.get(parts[1])
                if team is None:
                    raise ValueError(f"unknown team {parts[1]!r}")
                rid = int(parts[2])
                x, y, yaw, vx, vy, vyaw = map(float, parts[3:])
                robots.append(RobotState(rid, team, Pose(Vec2(x, y), yaw),
                                         Vec2(vx, vy), vyaw))
            # unknown tags are ignored: forward compatibility
        except ValueError as exc:
            raise VisionDecodeError(f"line {lineno}: {exc}") from exc
    if frame_id is None:
        raise VisionDecodeError("missing F header line")
    if ball is None:
        raise VisionDecodeError("missing B ball line")
    try:
        return WorldFrame(frame_id, timestamp, ball, tuple(robots))
    except ValueError as exc:
        raise VisionDecodeError(str(exc)) from exc


def encode_vision_packet(world: WorldFrame) -> bytes:
    """Canonical encoding: header, ball, then robots ordered ours/theirs by id."""
    lines = [f"F {world.frame_id} {world.timestamp!r}"]
    b = world.ball
    lines.append(f"B {b.position.x!r} {b.position.y!r} {b.velocity.x!r} {b.velocity.y!r}")
    for team, token in ((Team.OURS, "us"), (Team.THEIRS, "them")):
        for r in sorted(world.team_robots(team), key=lambda r: r.id):
            lines.append(
                f"R {token} {r.id} {r.position.x!r} {r.position.y!r} {r.yaw!r} "
                f"{r.velocity.x!r} {r.velocity.y!r} {r.yaw_rate!r}")
    return ("\n".join(lines) + "\n").encode("ascii")


def decode_referee_packet(data: bytes | str) -> RefereeCommand:
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    token = text.strip()
    try:
        return RefereeCommand(token)
    except ValueError:
        raise VisionDecodeError(f"unknown referee token {token!r}") from None


class Mailbox:
    """Single-slot, latest-wins handoff between a receiver thread and the
    tick loop."""

    def __init__(self):
        self._cond = threading.Condition()
        self._item = None
        self.dropped = 0  # frames overwritten before being taken

    def put(self, item):
        with self._cond:
            if self._item is not None:
                self.dropped += 1
            self._item = item
            self._cond.notify()

    def take(self, timeout: float | None = None):
        with self._cond:
            if self._item is None:
                self._cond.wait(timeout)
            item, self._item = self._item, None
            return item


@dataclass
class EngineTickReport:
    frame_id: int
    phase: GamePhase
    assignment: RoleAssignment
    commands: dict[int, RobotCommand]
    elapsed: float  # s, wall clock for the whole tick
    packets: dict[int, bytes] = field(default_factory=dict)
    paths: dict[int, PathPolyline] = field(default_factory=dict)
    grid: PotentialGrid | None = None
    errors: dict[int, str] = field(default_factory=dict)
    overrun: bool = False

    def __post_init__(self):
        if self.elapsed < 0:
            raise ValueError("elapsed must be nonnegative")


class Engine:
    """Owns the per-frame pipeline plus the small mutable state around it:
    the game phase, per-robot yaw-error memory, manual-drive overrides, and
    the live config. All mutation happens between ticks on the tick thread;
    other threads talk to it through post_* inboxes."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.phase = GamePhase.HALT
        self._yaw_error_prev: dict[int, float] = {}
        self._manual: dict[int, RobotCommand] = {}
        self._inbox_lock = threading.Lock()
        self._referee_inbox: list[RefereeCommand] = []
        self._command_inbox: list = []  # OperatorCommand payloads from the gateway
        self.tick_count = 0
        self.decode_errors = Counter()

    # -- cross-thread inboxes ------------------------------------------------

    def post_referee(self, cmd: RefereeCommand):
        with self._inbox_lock:
            self._referee_inbox.append(cmd)

    def post_operator(self, apply_fn):
        """Queue a callable run on the tick thread before the next tick."""
        with self._inbox_lock:
            self._command_inbox.append(apply_fn)

    def drain_inboxes(self):
        """Apply queued referee commands and operator actions atomically
        between ticks; never call mid-tick."""
        with self._inbox_lock:
            referee, self._referee_inbox = self._referee_inbox, []
            ops, self._command_inbox = self._command_inbox, []
        for cmd in referee:
            self.phase = update_phase(self.phase, cmd)
        for apply_fn in ops:
            apply_fn(self)

    # -- operator controls (run on the tick thread via post_operator) --------

    def set_manual(self, robot_id: int, cmd: RobotCommand | None):
        if cmd is None:
            self._manual.pop(robot_id, None)
        else:
            self._manual[robot_id] = cmd

    def set_param(self, name: str, value: float):
        self.config = set_param(self.config, name, value)

    # -- the pipeline ---------------------------------------------------------

    def tick(self, world: WorldFrame) -> EngineTickReport:
        t0 = time.perf_counter()
        cfg = self.config
        scfg = cfg.strategy_config()
        phase = self.phase
        ours = world.ours

        requests = select_role_set(world, phase, len(ours), cfg.policy)
        grid = None
        if phase is not GamePhase.HALT and any(r.kind in GRID_ROLES for r in requests):
            grid = self._pass_grid(world, cfg)

        assignment = assign_roles(requests, world, cfg.geo, grid, scfg)
        slot_counts = Counter(kind for kind, _ in assignment.by_robot.values())

        commands: dict[int, RobotCommand] = {}
        paths: dict[int, PathPolyline] = {}
        errors: dict[int, str] = {}
        for robot in ours:
            kind, slot = assignment.by_robot[robot.id]
            try:
                target = run_role(kind, slot, robot, world, phase, grid,
                                  cfg.geo, scfg, n_slots=slot_counts[kind])
                path = self._plan(robot, target.target.position, world, cfg)
                if path is not None:
                    paths[robot.id] = path
                yaw_error = wrap_angle(target.target.yaw - robot.yaw)
                cmd = compute_command(
                    robot, target, path, cfg.dt, cfg.profile, cfg.gains,
                    cfg.params, phase, self._yaw_error_prev.get(robot.id, 0.0),
                    cfg.omega_limit)
                self._yaw_error_prev[robot.id] = yaw_error
            except (ValueError, PathBlocked) as exc:
                cmd = ZERO_COMMAND
                errors[robot.id] = f"{kind.value}: {exc}"
                self._yaw_error_prev[robot.id] = 0.0
            commands[robot.id] = cmd

        if phase is not GamePhase.HALT:
            for robot_id, manual in self._manual.items():
                if robot_id in commands:
                    commands[robot_id] = clamp_command(manual, cfg.params)
        else:
            commands = {rid: ZERO_COMMAND for rid in commands}

        packets = self._encode_all(commands, cfg)
        elapsed = time.perf_counter() - t0
        report = EngineTickReport(
            frame_id=world.frame_id, phase=phase, assignment=assignment,
            commands=commands, elapsed=elapsed, packets=packets, paths=paths,
            grid=grid, errors=errors, overrun=elapsed > cfg.dt)
        if report.overrun:
            logger.warning("tick %d overran the frame budget: %.2f ms",
                           world.frame_id, elapsed * 1e3)
        self.tick_count += 1
        return report

    def _pass_grid(self, world: WorldFrame, cfg: EngineConfig) -> PotentialGrid:
        spec = GridSpec.for_field(cfg.geo, cfg.cell_size)
        ball = world.ball.position
        # opponents both cast shadows and crowd receiving spots; friendly
        # robots must not repel their own target cells
        opponents = [r.position for r in world.theirs]
        layers = [
            (build_mask(mask, spec, ball, opponents, opponents, cfg.geo), mask.weight)
            for mask in cfg.masks
        ]
        return combine_masks(spec, layers)

    def _plan(self, robot, goal: Vec2, world: WorldFrame, cfg: EngineConfig) -> PathPolyline | None:
        start = robot.position
        if start.dist(goal) < cfg.profile.stop_epsilon:
            return None
        inflated = 2.0 * cfg.params.robot_radius
        obstacles = []
        for other in world.robots:
            if other.team is robot.team and other.id == robot.id:
                continue
            # unavoidable discs (already overlapping either endpoint) are the
            # caller's problem, not the planner's
            if other.position.dist(start) <= inflated + cfg.path_margin:
                continue
            if other.position.dist(goal) <= inflated + cfg.path_margin:
                continue
            obstacles.append((other.position, inflated))
        return plan_path(start, goal, obstacles, cfg.path_margin, cfg.path_max_depth)

    def _encode_all(self, commands: dict[int, RobotCommand], cfg: EngineConfig) -> dict[int, bytes]:
        transports = {ep.robot_id: ep.transport for ep in cfg.endpoints}
        packets = {}
        for rid, cmd in commands.items():
            if transports.get(rid) == "serial" and 0 <= rid <= 15:
                packets[rid] = encode_serial_frame(rid, cmd)
            else:
                packets[rid] = encode_udp_csv(cmd)
        return packets


class UdpReceiver(threading.Thread):
    """Background datagram listener; decoded payloads go to on_packet."""

    def __init__(self, port: int, decode, on_packet, name: str):
        super().__init__(name=name, daemon=True)
        self._decode = decode
        self._on_packet = on_packet
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind(("", port))
        self._sock.settimeout(0.25)
        self._shutdown = threading.Event()
        self.decode_failures = 0

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def run(self):
        while not self._shutdown.is_set():
            try:
                data, _addr = self._sock.recvfrom(65535)
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                self._on_packet(self._decode(data))
            except ValueError as exc:
                self.decode_failures += 1
                logger.warning("%s: dropped packet: %s", self.name, exc)

    def stop(self):
        self._shutdown.set()
        self._sock.close()
