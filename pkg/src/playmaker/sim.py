"""Kinematic match simulator: robot motion, ball physics with linear
friction, the dribbler capture zone, kick impulses, and the closed-loop
match harness that drives the engine against the simulated world.

Deliberately kinematic: robots follow their (wheel-clamped) commands
exactly, there is no contact dynamics, and walls clamp. Two pieces of
plumbing keep the kick physically sane: a per-robot kick cooldown (the
booster recharges) and a capture gate that only pins a ball moving slowly
relative to the robot, so a freshly kicked ball actually leaves.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .config import EngineConfig
from .engine import Engine
from .motion import RobotCommand, clamp_command
from .world import (
    BALL_RADIUS,
    BallState,
    FieldGeometry,
    GamePhase,
    Pose,
    RobotParams,
    RobotState,
    Team,
    Vec2,
    WorldFrame,
    rotate,
    with_ball,
    wrap_angle,
)

KICK_COOLDOWN = 0.5  # s between kicks per robot
CAPTURE_MAX_REL_SPEED = 1.0  # m/s; faster balls cannot be pinned


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1.0 / 60.0
    ball_friction_decel: float = 0.5  # m/s^2
    kick_speed_max: float = 6.5  # m/s at power 100
    capture_distance: float = 0.1  # m from robot center
    capture_half_angle: float = math.radians(20.0)
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if min(self.ball_friction_decel, self.kick_speed_max,
               self.capture_distance, self.capture_half_angle) <= 0:
            raise ValueError("simulator magnitudes must be positive")


def sim_config_from(cfg: EngineConfig, seed: int | None = None) -> SimConfig:
    return SimConfig(
        dt=cfg.dt,
        ball_friction_decel=cfg.sim.ball_friction,
        kick_speed_max=cfg.sim.kick_speed_max,
        capture_distance=cfg.sim.capture_distance,
        capture_half_angle=cfg.sim.capture_half_angle,
        seed=cfg.sim.seed if seed is None else seed,
    )


class EventKind(Enum):
    KICK = "KICK"
    PASS_COMPLETED = "PASS_COMPLETED"
    BALL_CONTACT_GAINED = "BALL_CONTACT_GAINED"
    PHASE_CHANGE = "PHASE_CHANGE"
    GOAL = "GOAL"


@dataclass(frozen=True)
class MatchEvent:
    tick: int
    kind: EventKind
    subjects: tuple[str, ...] = ()

    def to_line(self) -> str:
        return " ".join([str(self.tick), self.kind.value, *self.subjects])

    @classmethod
    def from_line(cls, line: str) -> "MatchEvent":
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"bad event line {line!r}")
        return cls(int(parts[0]), EventKind(parts[1]), tuple(parts[2:]))


def write_event_log(events: list[MatchEvent], path: str | Path):
    Path(path).write_text("".join(e.to_line() + "\n" for e in events))


def read_event_log(path: str | Path) -> list[MatchEvent]:
    return [MatchEvent.from_line(line)
            for line in Path(path).read_text().splitlines() if line.strip()]


def _subject(robot: RobotState) -> str:
    return f"{'us' if robot.team is Team.OURS else 'them'}:{robot.id}"


def ball_contact(robot: RobotState, ball: BallState, cfg: SimConfig) -> bool:
    """Geometric stand-in for the break-beam detector: ball near the robot
    center and within the dribbler's angular window."""
    offset = ball.position - robot.position
    if offset.norm() > cfg.capture_distance:
        return False
    if offset.norm() == 0.0:
        return True
    bearing = math.atan2(offset.y, offset.x)
    return abs(wrap_angle(bearing - robot.yaw)) <= cfg.capture_half_angle


class Simulator:
    """Steps a WorldFrame under per-robot commands; accumulates MatchEvents."""

    def __init__(self, cfg: SimConfig, geo: FieldGeometry, params: RobotParams):
        self.cfg = cfg
        self.geo = geo
        self.params = params
        self.tick_index = 0
        self._kick_ready: dict[tuple[Team, int], float] = {}
        self._goal_latched = False

    def step(self, world: WorldFrame, commands: dict[int, RobotCommand]) -> tuple[WorldFrame, list[MatchEvent]]:
        cfg = self.cfg
        dt = cfg.dt
        events: list[MatchEvent] = []
        margin = self.geo.boundary_margin

        moved: list[RobotState] = []
        kicked_by: RobotState | None = None
        kick_speed = 0.0
        holder: RobotState | None = None
        for robot in world.robots:
            cmd = commands.get(robot.id) if robot.team is Team.OURS else None
            if cmd is None:
                moved.append(replace(robot, velocity=Vec2(0.0, 0.0), yaw_rate=0.0))
                continue
            cmd = clamp_command(cmd, self.params)
            v_field = rotate(Vec2(cmd.vx, cmd.vy), robot.yaw)
            pos = self.geo.clamp(robot.position + v_field * dt, margin)
            yaw = wrap_angle(robot.yaw + cmd.vtheta * dt)
            new_robot = replace(robot, pose=Pose(pos, yaw), velocity=v_field,
                                yaw_rate=cmd.vtheta)
            moved.append(new_robot)
            key = (robot.team, robot.id)
            if robot.ball_contact and cmd.kick_power > 0 \
                    and self.tick_index >= self._kick_ready.get(key, 0):
                kicked_by = new_robot
                kick_speed = cmd.kick_power / 100.0 * cfg.kick_speed_max
                self._kick_ready[key] = self.tick_index + max(1, round(KICK_COOLDOWN / dt))
            elif robot.ball_contact and cmd.dribble_power > 0 and kicked_by is None:
                rel = (world.ball.velocity - robot.velocity).norm()
                if rel <= CAPTURE_MAX_REL_SPEED:
                    holder = new_robot

        ball = world.ball
        if kicked_by is not None:
            # launch exactly at the commanded speed; flight starts next tick
            heading = Vec2(math.cos(kicked_by.yaw), math.sin(kicked_by.yaw))
            ball = BallState(ball.position, heading * kick_speed)
            events.append(MatchEvent(self.tick_index, EventKind.KICK, (_subject(kicked_by),)))
        elif holder is not None:
            pin = holder.position + Vec2(math.cos(holder.yaw), math.sin(holder.yaw)) \
                * (cfg.capture_distance * 0.9)
            ball = BallState(self.geo.clamp(pin, margin), holder.velocity)
        else:
            new_pos = ball.position + ball.velocity * dt
            speed = ball.velocity.norm()
            slowed = max(0.0, speed - cfg.ball_friction_decel * dt)
            vel = ball.velocity * (slowed / speed) if speed > 0 else ball.velocity
            clamped = self.geo.clamp(new_pos, margin)
            if clamped != new_pos:
                vel = Vec2(0.0, 0.0)  # dead walls
            events.extend(self._goal_events(ball.position, new_pos))
            ball = BallState(clamped, vel)

        final: list[RobotState] = []
        for robot in moved:
            contact = ball_contact(robot, ball, cfg)
            if kicked_by is not None and robot.team is kicked_by.team \
                    and robot.id == kicked_by.id:
                contact = False  # the kick clears the detector this frame
            if contact and not robot.ball_contact:
                events.append(MatchEvent(self.tick_index,
                                         EventKind.BALL_CONTACT_GAINED,
                                         (_subject(robot),)))
            final.append(replace(robot, ball_contact=contact))

        self.tick_index += 1
        next_world = WorldFrame(world.frame_id + 1, world.timestamp + dt,
                                ball, tuple(final))
        return next_world, events

    def _goal_events(self, old_pos: Vec2, new_pos: Vec2) -> list[MatchEvent]:
        half_gw = self.geo.goal_width / 2.0
        hl = self.geo.half_length
        if self._goal_latched:
            if abs(new_pos.x) < hl:
                self._goal_latched = False
            return []
        for side, scorer in ((hl, "us"), (-hl, "them")):
            crossed = (old_pos.x - side) * (new_pos.x - side) < 0 or \
                (abs(old_pos.x) < abs(side) <= abs(new_pos.x))
            if crossed and abs(new_pos.y) <= half_gw:
                self._goal_latched = True
                return [MatchEvent(self.tick_index, EventKind.GOAL, (scorer,))]
        return []


# ---------------------------------------------------------------------------
# closed-loop match harness


# base formations for up to 8 robots a side, jittered per seed
_OUR_SLOTS = [
    (-4.2, 0.0), (-3.2, -0.9), (-3.2, 0.9), (-1.6, -1.3),
    (-1.6, 1.3), (-0.9, 0.0), (-2.2, -2.2), (-2.2, 2.2),
]
_THEIR_SLOTS = [
    (4.2, 0.0), (2.4, 0.0), (3.2, -0.9), (3.2, 0.9),
    (2.6, -1.8), (2.6, 1.8), (3.8, -0.4), (3.8, 0.4),
]


def initial_world(seed: int, geo: FieldGeometry, n_ours: int = 8, n_theirs: int = 8) -> WorldFrame:
    """Kickoff placement: both teams in their own halves, ball centered.
    The opponent nearest the center line sits on the shot ray so the opening
    play is a pass, not an open shot."""
    rng = random.Random(seed)
    robots: list[RobotState] = []
    for i in range(min(n_ours, len(_OUR_SLOTS))):
        x, y = _OUR_SLOTS[i]
        pos = Vec2(x + rng.uniform(-0.15, 0.15), y + rng.uniform(-0.15, 0.15))
        robots.append(RobotState(i, Team.OURS, Pose(geo.clamp(pos), 0.0)))
    for i in range(min(n_theirs, len(_THEIR_SLOTS))):
        x, y = _THEIR_SLOTS[i]
        jitter = 0.1 if (x, y) == (2.4, 0.0) else 0.15
        pos = Vec2(x + rng.uniform(-jitter, jitter), y + rng.uniform(-jitter, jitter))
        robots.append(RobotState(i, Team.THEIRS, Pose(geo.clamp(pos), math.pi)))
    return WorldFrame(0, 0.0, BallState(Vec2(0.0, 0.0)), tuple(robots))


class PassTracker:
    """Recognizes a completed pass: a friendly kick followed by a different
    friendly robot gaining contact before any opponent touches the ball."""

    def __init__(self):
        self._kicker: str | None = None

    def reset(self):
        self._kicker = None

    def observe(self, event: MatchEvent) -> MatchEvent | None:
        if event.kind is EventKind.KICK:
            subject = event.subjects[0]
            self._kicker = subject if subject.startswith("us:") else None
            return None
        if event.kind is not EventKind.BALL_CONTACT_GAINED or self._kicker is None:
            return None
        subject = event.subjects[0]
        if subject.startswith("them:"):
            self._kicker = None  # intercepted
            return None
        if subject != self._kicker:
            kicker, self._kicker = self._kicker, None
            return MatchEvent(event.tick, EventKind.PASS_COMPLETED,
                              (kicker, subject))
        return None


def run_match(
    ticks: int,
    seed: int,
    config: EngineConfig | None = None,
    n_ours: int = 8,
    n_theirs: int = 8,
    record: str | Path | None = None,
    stop_on: EventKind | None = None,
) -> list[MatchEvent]:
    """Closed-loop engine-vs-simulator match; returns the event log.

    Play starts immediately (batch mode has no referee), so the log contains
    only match events. With stop_on set, the match ends early once that
    event kind appears (handy when only the first pass matters).
    """
    if ticks <= 0:
        raise ValueError("ticks must be positive")
    config = config or EngineConfig()
    engine = Engine(config)
    engine.phase = GamePhase.RUN
    sim = Simulator(sim_config_from(config, seed), config.geo, config.params)
    world = initial_world(seed, config.geo, n_ours, n_theirs)
    tracker = PassTracker()
    events: list[MatchEvent] = []
    last_phase = engine.phase
    for _ in range(ticks):
        engine.drain_inboxes()
        if engine.phase is not last_phase:
            events.append(MatchEvent(sim.tick_index, EventKind.PHASE_CHANGE,
                                     (engine.phase.value,)))
            last_phase = engine.phase
        report = engine.tick(world)
        world, new_events = sim.step(world, report.commands)
        for event in new_events:
            events.append(event)
            completed = tracker.observe(event)
            if completed is not None:
                events.append(completed)
        ball_pos = world.ball.position
        if abs(ball_pos.x) > config.geo.half_length or abs(ball_pos.y) > config.geo.half_width:
            # out of play (or in the goal): restart from the center, as the
            # referee would; any pass in flight is dead
            world = with_ball(world, BallState(Vec2(0.0, 0.0)))
            tracker.reset()
        if stop_on is not None and any(e.kind is stop_on for e in events):
            break
    if record is not None:
        write_event_log(events, record)
    return events
