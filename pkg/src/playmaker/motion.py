"""Velocity command generation: cut-trapezoid speed profiling along the
planned path, PD control of yaw, and wheel-speed-limited clamping.

The speed profile is a trapezoid with both ends cut: commanded speed is
floored at v_cut whenever the robot is still outside stop_epsilon of the
goal, and forced to zero inside it. The floor is what keeps short, slow
moves from crawling; the hard zero prevents limit cycling around the goal.
Commands are robot-local: vx forward, vy left, vtheta counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .world import GamePhase, RobotParams, RobotState, rotate, wrap_angle

if TYPE_CHECKING:
    from .pathplan import PathPolyline
    from .strategy import MotionTarget

# standard rules cap in the STOP phase
STOP_PHASE_SPEED_CAP = 1.5  # m/s


@dataclass(frozen=True)
class ProfileParams:
    a_max: float = 2.5  # m/s^2
    v_max: float = 3.0  # m/s
    v_cut: float = 0.3  # m/s, nonzero floor at both profile ends
    stop_epsilon: float = 0.005  # m

    def __post_init__(self):
        if not (0.0 < self.v_cut < self.v_max):
            raise ValueError("need 0 < v_cut < v_max")
        if self.a_max <= 0.0:
            raise ValueError("a_max must be positive")
        if self.stop_epsilon <= 0.0:
            raise ValueError("stop_epsilon must be positive")


@dataclass(frozen=True)
class YawGains:
    kp: float = 4.0  # 1/s
    kd: float = 0.4

    def __post_init__(self):
        if self.kp < 0.0 or self.kd < 0.0:
            raise ValueError("gains must be nonnegative")


@dataclass(frozen=True)
class RobotCommand:
    vx: float = 0.0  # m/s, robot-local forward
    vy: float = 0.0  # m/s, robot-local left
    vtheta: float = 0.0  # rad/s
    kick_power: int = 0  # 0..100
    dribble_power: int = 0  # 0..100

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.vx, self.vy, self.vtheta)):
            raise ValueError("non-finite velocity command")
        if not (0 <= self.kick_power <= 100 and 0 <= self.dribble_power <= 100):
            raise ValueError("powers must be within 0..100")

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


ZERO_COMMAND = RobotCommand()


def profile_speed(d_remaining: float, v_current: float, dt: float, p: ProfileParams) -> float:
    """Commanded speed for the cut trapezoid.

    Zero inside stop_epsilon; otherwise the least of v_max, the
    acceleration-limited ramp from v_current, and the braking parabola
    sqrt(2 a d), floored at v_cut.
    """
    if d_remaining < 0.0:
        raise ValueError("d_remaining must be nonnegative")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if d_remaining < p.stop_epsilon:
        return 0.0
    ramp = v_current + p.a_max * dt
    brake = math.sqrt(2.0 * p.a_max * d_remaining)
    return max(p.v_cut, min(p.v_max, ramp, brake))


def yaw_pd(error: float, error_prev: float, dt: float, g: YawGains, omega_limit: float) -> float:
    """PD yaw-rate command on wrapped yaw error, clamped to +-omega_limit.

    The derivative uses the wrapped difference of consecutive errors so a
    setpoint crossing the -pi/pi seam does not inject a 2*pi kick.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    derivative = wrap_angle(error - error_prev) / dt
    omega = g.kp * error + g.kd * derivative
    return min(max(omega, -omega_limit), omega_limit)


def wheel_speeds(cmd: RobotCommand, params: RobotParams) -> tuple[float, float, float, float]:
    """Angular speed of each wheel (rad/s) for a robot-local command.

    Wheel i at azimuth phi drives along the tangent (-sin phi, cos phi), so
    w_i = (-sin(phi) vx + cos(phi) vy + R vtheta) / r.
    """
    r = params.wheel_radius
    big_r = params.wheel_offset_radius
    return tuple(
        (-math.sin(phi) * cmd.vx + math.cos(phi) * cmd.vy + big_r * cmd.vtheta) / r
        for phi in params.wheel_azimuths
    )


def clamp_command(cmd: RobotCommand, params: RobotParams) -> RobotCommand:
    """Scale (vx, vy, vtheta) uniformly so no wheel exceeds its rpm limit.

    Direction is preserved; when clamping engages the fastest wheel lands
    exactly on the limit.
    """
    peak = max(abs(w) for w in wheel_speeds(cmd, params))
    omega_max = params.max_wheel_omega
    if peak <= omega_max:
        return cmd
    scale = omega_max / peak
    return RobotCommand(
        cmd.vx * scale, cmd.vy * scale, cmd.vtheta * scale,
        cmd.kick_power, cmd.dribble_power,
    )


def compute_command(
    robot: RobotState,
    target: "MotionTarget",
    path: "PathPolyline | None",
    dt: float,
    profile: ProfileParams,
    gains: YawGains,
    params: RobotParams,
    phase: GamePhase,
    yaw_error_prev: float = 0.0,
    omega_limit: float = 6.0,
) -> RobotCommand:
    """One robot's velocity command for this frame.

    Translation heads for the first waypoint at the profiled speed of the
    full remaining path length (so detours brake correctly), rotated into
    the robot frame. Yaw rate is PD toward the target yaw. The result is
    wheel-limit clamped, and capped to the STOP-phase ground speed when the
    phase or the target's urgency asks for it.
    """
    if path is None or len(path.waypoints) < 2:
        speed = 0.0
        direction = None
    else:
        d_remaining = path.length()
        speed = profile_speed(d_remaining, robot.velocity.norm(), dt, profile)
        direction = (path.waypoints[1] - robot.position).normalized()
        if direction.norm() == 0.0:
            speed = 0.0
            direction = None

    capped = phase is GamePhase.STOP or target.urgency == "stop_phase"
    if capped and speed > STOP_PHASE_SPEED_CAP:
        speed = STOP_PHASE_SPEED_CAP

    if direction is None or speed == 0.0:
        vx_local = vy_local = 0.0
    else:
        v_local = rotate(direction * speed, -robot.yaw)
        vx_local, vy_local = v_local.x, v_local.y

    yaw_error = wrap_angle(target.target.yaw - robot.yaw)
    vtheta = yaw_pd(yaw_error, yaw_error_prev, dt, gains, omega_limit)

    cmd = RobotCommand(vx_local, vy_local, vtheta, target.kick_power, target.dribble_power)
    return clamp_command(cmd, params)
