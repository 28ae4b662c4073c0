"""Core domain types, field geometry, angle math, and the game-phase machine.

Everything here is immutable value data; operations are pure functions, so
instances can be copied and handed between threads freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

# SSL ball is a standard golf ball.
BALL_RADIUS = 0.0215  # m

MAX_ROBOTS_PER_TEAM = 16


class Team(Enum):
    OURS = "ours"
    THEIRS = "theirs"


class GamePhase(Enum):
    HALT = "HALT"
    STOP = "STOP"
    PREPARE_KICKOFF_US = "PREPARE_KICKOFF_US"
    PREPARE_KICKOFF_THEM = "PREPARE_KICKOFF_THEM"
    RUN = "RUN"


class RefereeCommand(Enum):
    HALT = "HALT"
    STOP = "STOP"
    FORCE_START = "FORCE_START"
    NORMAL_START = "NORMAL_START"
    PREPARE_KICKOFF_US = "PREPARE_KICKOFF_US"
    PREPARE_KICKOFF_THEM = "PREPARE_KICKOFF_THEM"


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(self.x / n, self.y / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True)
class Pose:
    """Position plus yaw; yaw is kept wrapped to (-pi, pi]."""

    position: Vec2
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


@dataclass(frozen=True)
class RobotState:
    id: int
    team: Team
    pose: Pose
    velocity: Vec2 = field(default_factory=lambda: Vec2(0.0, 0.0))
    yaw_rate: float = 0.0  # rad/s
    ball_contact: bool = False

    @property
    def position(self) -> Vec2:
        return self.pose.position

    @property
    def yaw(self) -> float:
        return self.pose.yaw


@dataclass(frozen=True)
class BallState:
    position: Vec2
    velocity: Vec2 = field(default_factory=lambda: Vec2(0.0, 0.0))


@dataclass(frozen=True)
class WorldFrame:
    """One timestamped snapshot of the ball and every robot; the per-frame
    trigger for the whole pipeline."""

    frame_id: int
    timestamp: float  # s
    ball: BallState
    robots: tuple[RobotState, ...] = ()

    def __post_init__(self):
        for team in Team:
            ids = [r.id for r in self.robots if r.team is team]
            if len(ids) > MAX_ROBOTS_PER_TEAM:
                raise ValueError(f"more than {MAX_ROBOTS_PER_TEAM} robots for {team.value}")
            if len(ids) != len(set(ids)):
                raise ValueError(f"duplicate robot id within {team.value}")

    def team_robots(self, team: Team) -> list[RobotState]:
        return [r for r in self.robots if r.team is team]

    @property
    def ours(self) -> list[RobotState]:
        return self.team_robots(Team.OURS)

    @property
    def theirs(self) -> list[RobotState]:
        return self.team_robots(Team.THEIRS)

    def robot(self, team: Team, robot_id: int) -> RobotState | None:
        for r in self.robots:
            if r.team is team and r.id == robot_id:
                return r
        return None


@dataclass(frozen=True)
class FieldGeometry:
    """Axis-aligned field, origin at center, our goal on the -x side."""

    length: float = 9.0  # m, x extent
    width: float = 6.0  # m, y extent
    penalty_depth: float = 1.0  # m, along x from the goal line
    penalty_width: float = 2.0  # m, along y
    goal_width: float = 1.0  # m
    boundary_margin: float = 0.3  # m of legal space beyond the lines

    def __post_init__(self):
        if min(self.length, self.width, self.penalty_depth, self.penalty_width,
               self.goal_width, self.boundary_margin) <= 0:
            raise ValueError("all field dimensions must be positive")
        if self.penalty_width >= self.width:
            raise ValueError("penalty_width must be smaller than field width")
        if self.goal_width >= self.penalty_width:
            raise ValueError("goal_width must be smaller than penalty_width")

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    def goal_center(self, side: Team) -> Vec2:
        x = -self.half_length if side is Team.OURS else self.half_length
        return Vec2(x, 0.0)

    def goal_mouth(self, side: Team) -> tuple[Vec2, Vec2]:
        x = -self.half_length if side is Team.OURS else self.half_length
        return Vec2(x, -self.goal_width / 2.0), Vec2(x, self.goal_width / 2.0)

    def contains(self, p: Vec2, margin: float = 0.0) -> bool:
        return (abs(p.x) <= self.half_length + margin
                and abs(p.y) <= self.half_width + margin)

    def clamp(self, p: Vec2, margin: float = 0.0) -> Vec2:
        return Vec2(
            min(max(p.x, -self.half_length - margin), self.half_length + margin),
            min(max(p.y, -self.half_width - margin), self.half_width + margin),
        )


@dataclass(frozen=True)
class RobotParams:
    """Drive geometry and limits; bridges the hardware numbers to kinematics.

    Wheel azimuths are the angular positions of the wheels around the robot
    measured from the +x (forward) axis; each wheel drives along the tangent
    at its azimuth.
    """

    wheel_radius: float = 0.0275  # m
    wheel_azimuths: tuple[float, float, float, float] = (
        math.radians(45.0),
        math.radians(135.0),
        math.radians(225.0),
        math.radians(315.0),
    )
    wheel_offset_radius: float = 0.08  # m, wheel contact circle radius
    max_wheel_rpm: float = 1557.0
    robot_radius: float = 0.09  # m
    com_height: float = 0.0397  # m, informational only

    def __post_init__(self):
        if self.wheel_radius <= 0:
            raise ValueError("wheel_radius must be positive")
        if self.max_wheel_rpm <= 0:
            raise ValueError("max_wheel_rpm must be positive")
        if len(set(self.wheel_azimuths)) != 4:
            raise ValueError("wheel azimuths must be 4 distinct angles")

    @property
    def max_wheel_omega(self) -> float:
        """Wheel angular speed limit in rad/s."""
        return self.max_wheel_rpm * 2.0 * math.pi / 60.0


TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]; -pi maps to pi."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite angle: {theta!r}")
    wrapped = theta - TWO_PI * math.floor((theta + math.pi) / TWO_PI)
    # floor rounding can land exactly on -pi; keep the open-interval form
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


# (phase, command) pairs that change phase; anything absent leaves it alone.
_PHASE_TRANSITIONS: dict[tuple[GamePhase, RefereeCommand], GamePhase] = {
    (GamePhase.STOP, RefereeCommand.PREPARE_KICKOFF_US): GamePhase.PREPARE_KICKOFF_US,
    (GamePhase.STOP, RefereeCommand.PREPARE_KICKOFF_THEM): GamePhase.PREPARE_KICKOFF_THEM,
    (GamePhase.STOP, RefereeCommand.FORCE_START): GamePhase.RUN,
    (GamePhase.PREPARE_KICKOFF_US, RefereeCommand.NORMAL_START): GamePhase.RUN,
    (GamePhase.PREPARE_KICKOFF_THEM, RefereeCommand.NORMAL_START): GamePhase.RUN,
}


def update_phase(phase: GamePhase, command: RefereeCommand) -> GamePhase:
    """Advance the game-phase machine by one referee command."""
    if command is RefereeCommand.HALT:
        return GamePhase.HALT
    if command is RefereeCommand.STOP:
        return GamePhase.STOP
    return _PHASE_TRANSITIONS.get((phase, command), phase)


def in_penalty_area(p: Vec2, side: Team, geo: FieldGeometry) -> bool:
    """True iff p lies inside (boundary inclusive) the penalty rectangle
    adjoining the named goal line."""
    half_pw = geo.penalty_width / 2.0
    if abs(p.y) > half_pw:
        return False
    if side is Team.OURS:
        return -geo.half_length <= p.x <= -geo.half_length + geo.penalty_depth
    return geo.half_length - geo.penalty_depth <= p.x <= geo.half_length


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    """Euclidean distance from p to the closed segment ab."""
    ab = b - a
    seg2 = ab.dot(ab)
    if seg2 == 0.0:
        return p.dist(a)
    t = (p - a).dot(ab) / seg2
    t = min(max(t, 0.0), 1.0)
    return p.dist(a + ab * t)


def rotate(v: Vec2, angle: float) -> Vec2:
    """Rotate v counterclockwise by angle."""
    c, s = math.cos(angle), math.sin(angle)
    return Vec2(c * v.x - s * v.y, s * v.x + c * v.y)


def with_ball(frame: WorldFrame, ball: BallState) -> WorldFrame:
    return replace(frame, ball=ball)
