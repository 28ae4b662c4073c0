"""Role selection, priority-greedy assignment, and per-role skills.

Each frame the strategy picks a role set from the possession situation,
assigns roles to robots greedily by priority (each request takes the
unassigned robot nearest its anchor point), and runs each role's skill to
produce a motion target for the controller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .potential import PotentialGrid, best_cell, crowd_mask, top_cells
from .world import (
    BALL_RADIUS,
    FieldGeometry,
    GamePhase,
    Pose,
    RobotParams,
    RobotState,
    Team,
    Vec2,
    WorldFrame,
    point_segment_distance,
    wrap_angle,
)


class RoleKind(Enum):
    GOALIE = "Goalie"
    ATTACKER = "Attacker"
    DEFENDER = "Defender"
    PASS_RECEIVER = "PassReceiver"
    PASS_INTERRUPTER = "PassInterrupter"
    WAITER = "Waiter"


@dataclass(frozen=True)
class RoleRequest:
    kind: RoleKind
    priority: int  # lower is more important
    slot: int = 0  # instance index for multi-robot roles

    def __post_init__(self):
        if self.kind is RoleKind.GOALIE and self.priority != 0:
            raise ValueError("the goalie request always has priority 0")


@dataclass(frozen=True)
class RoleAssignment:
    by_robot: dict[int, tuple[RoleKind, int]]

    def __post_init__(self):
        kinds = [kind for kind, _ in self.by_robot.values()]
        if kinds.count(RoleKind.ATTACKER) > 1:
            raise ValueError("at most one attacker")
        if self.by_robot and kinds.count(RoleKind.GOALIE) != 1:
            raise ValueError("exactly one goalie when any robot exists")

    def role_of(self, robot_id: int) -> tuple[RoleKind, int] | None:
        return self.by_robot.get(robot_id)


@dataclass(frozen=True)
class MotionTarget:
    target: Pose
    kick_power: int = 0  # 0..100
    dribble_power: int = 0  # 0..100
    urgency: str = "normal"  # or "stop_phase"

    def __post_init__(self):
        if not (0 <= self.kick_power <= 100 and 0 <= self.dribble_power <= 100):
            raise ValueError("powers must be within 0..100")


# role counts by possession; extras become waiters, shortfall drops the tail
@dataclass(frozen=True)
class RolePolicy:
    attacking: tuple[RoleKind, ...] = (
        RoleKind.GOALIE, RoleKind.ATTACKER, RoleKind.DEFENDER,
        RoleKind.DEFENDER, RoleKind.PASS_RECEIVER, RoleKind.PASS_RECEIVER,
    )
    defending: tuple[RoleKind, ...] = (
        RoleKind.GOALIE, RoleKind.ATTACKER, RoleKind.DEFENDER,
        RoleKind.DEFENDER, RoleKind.PASS_INTERRUPTER, RoleKind.PASS_INTERRUPTER,
    )


@dataclass(frozen=True)
class StrategyConfig:
    params: RobotParams = field(default_factory=RobotParams)
    policy: RolePolicy = field(default_factory=RolePolicy)
    receiver_separation: float = 1.0  # m between pass receiver slots
    defender_spacing: float = 0.25  # m between defender slots on the perimeter
    defender_offset: float = 0.005  # m outward so targets sit outside the area
    align_tolerance: float = 0.12  # rad of yaw error before kicking
    approach_dribble_range: float = 0.5  # m, spin up the dribbler near the ball
    shot_power: int = 100
    dribble_hold: int = 60
    pass_power_min: int = 15
    pass_power_max: int = 90
    ball_friction: float = 0.5  # m/s^2, nominal, sizes pass kicks
    kick_speed_max: float = 6.5  # m/s at power 100


def we_possess(world: WorldFrame) -> bool:
    """Ours if a friendly robot holds the ball or is nearest to it."""
    ours = world.ours
    if any(r.ball_contact for r in ours):
        return True
    if not ours:
        return False
    theirs = world.theirs
    if not theirs:
        return True
    our_best = min(r.position.dist(world.ball.position) for r in ours)
    their_best = min(r.position.dist(world.ball.position) for r in theirs)
    return our_best <= their_best


def select_role_set(
    world: WorldFrame,
    phase: GamePhase,
    n_robots: int,
    policy: RolePolicy | None = None,
) -> list[RoleRequest]:
    """Role requests for n_robots friendly robots, strictly prioritized."""
    if n_robots < 0:
        raise ValueError("n_robots must be nonnegative")
    policy = policy or RolePolicy()
    table = policy.attacking if we_possess(world) else policy.defending
    kinds = list(table[:n_robots])
    kinds += [RoleKind.WAITER] * (n_robots - len(kinds))
    slots: dict[RoleKind, int] = {}
    requests = []
    for priority, kind in enumerate(kinds):
        slot = slots.get(kind, 0)
        slots[kind] = slot + 1
        requests.append(RoleRequest(kind, priority, slot))
    return requests


# ---------------------------------------------------------------------------
# assignment


def _penalty_perimeter(geo: FieldGeometry) -> tuple[list[tuple[Vec2, Vec2, Vec2]], float]:
    """Our penalty-area perimeter as (start, end, outward normal) segments,
    walked from the goal line at -y around to the goal line at +y."""
    hl, hpw, d = geo.half_length, geo.penalty_width / 2.0, geo.penalty_depth
    segments = [
        (Vec2(-hl, -hpw), Vec2(-hl + d, -hpw), Vec2(0.0, -1.0)),
        (Vec2(-hl + d, -hpw), Vec2(-hl + d, hpw), Vec2(1.0, 0.0)),
        (Vec2(-hl + d, hpw), Vec2(-hl, hpw), Vec2(0.0, 1.0)),
    ]
    total = d + geo.penalty_width + d
    return segments, total


def _perimeter_point(geo: FieldGeometry, s: float, offset: float) -> Vec2:
    segments, total = _penalty_perimeter(geo)
    s = min(max(s, 0.0), total)
    for a, b, normal in segments:
        seg_len = a.dist(b)
        if s <= seg_len or (a, b, normal) == segments[-1]:
            t = min(s / seg_len, 1.0)
            p = a + (b - a) * t
            return p + normal * offset
        s -= seg_len
    raise AssertionError("unreachable")


def _perimeter_crossing(geo: FieldGeometry, ball: Vec2) -> float:
    """Arc-length position where the ball-to-goal-center segment crosses the
    perimeter; nearest perimeter point to the ball when it does not cross."""
    goal = geo.goal_center(Team.OURS)
    segments, _ = _penalty_perimeter(geo)
    walked = 0.0
    best_s = None
    best_d = math.inf
    for a, b, _normal in segments:
        seg_len = a.dist(b)
        hit = _segment_intersection(ball, goal, a, b)
        if hit is not None:
            return walked + hit * seg_len
        # fallback bookkeeping: nearest point on this segment to the ball
        t = _project_t(ball, a, b)
        d = ball.dist(a + (b - a) * t)
        if d < best_d:
            best_d = d
            best_s = walked + t * seg_len
        walked += seg_len
    return best_s if best_s is not None else 0.0


def _project_t(p: Vec2, a: Vec2, b: Vec2) -> float:
    ab = b - a
    seg2 = ab.dot(ab)
    if seg2 == 0.0:
        return 0.0
    return min(max((p - a).dot(ab) / seg2, 0.0), 1.0)


def _segment_intersection(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> float | None:
    """Parameter along q where segments p and q intersect, else None."""
    r = p2 - p1
    s = q2 - q1
    denom = r.x * s.y - r.y * s.x
    if abs(denom) < 1e-12:
        return None
    qp = q1 - p1
    t = (qp.x * s.y - qp.y * s.x) / denom
    u = (qp.x * r.y - qp.y * r.x) / -denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return u
    return None


def _marked_opponent(world: WorldFrame, geo: FieldGeometry, slot: int) -> RobotState | None:
    """Slot k marks the k-th nearest opponent to our goal."""
    goal = geo.goal_center(Team.OURS)
    ranked = sorted(world.theirs, key=lambda r: (r.position.dist(goal), r.id))
    if slot < len(ranked):
        return ranked[slot]
    return None


def _waiter_anchor(world: WorldFrame, geo: FieldGeometry) -> Vec2:
    """Center of the half the ball is not in."""
    x = -geo.length / 4.0 if world.ball.position.x >= 0.0 else geo.length / 4.0
    return Vec2(x, 0.0)


def role_anchor(
    request: RoleRequest,
    n_slots: int,
    world: WorldFrame,
    geo: FieldGeometry,
    grid: PotentialGrid | None,
    cfg: StrategyConfig,
) -> Vec2:
    """Anchor point whose distance defines the assignment cost for a role."""
    kind, slot = request.kind, request.slot
    if kind is RoleKind.GOALIE:
        return geo.goal_center(Team.OURS)
    if kind is RoleKind.ATTACKER:
        return world.ball.position
    if kind is RoleKind.DEFENDER:
        s_center = _perimeter_crossing(geo, world.ball.position)
        s = s_center + cfg.defender_spacing * (slot - (n_slots - 1) / 2.0)
        return _perimeter_point(geo, s, cfg.defender_offset)
    if kind is RoleKind.PASS_RECEIVER:
        if grid is not None:
            cells = top_cells(grid, slot + 1, cfg.receiver_separation, [], geo)
            if cells:
                return cells[min(slot, len(cells) - 1)]
        return Vec2(geo.length / 4.0, 0.0)
    if kind is RoleKind.PASS_INTERRUPTER:
        marked = _marked_opponent(world, geo, slot)
        if marked is not None:
            return (marked.position + world.ball.position) * 0.5
        return Vec2(-geo.length / 4.0, 0.0)
    return _waiter_anchor(world, geo)


def greedy_by_anchor(
    anchored: Sequence[tuple[RoleRequest, Vec2]],
    robots: Sequence[RobotState],
) -> RoleAssignment:
    """Greedy core: by ascending priority, each request takes the free robot
    nearest its anchor, ties to the lowest robot id."""
    free = {r.id: r for r in robots}
    by_robot: dict[int, tuple[RoleKind, int]] = {}
    for req, anchor in sorted(anchored, key=lambda pair: pair[0].priority):
        chosen = min(free.values(), key=lambda r: (r.position.dist(anchor), r.id))
        by_robot[chosen.id] = (req.kind, req.slot)
        del free[chosen.id]
    return RoleAssignment(by_robot)


def assign_roles(
    requests: Sequence[RoleRequest],
    world: WorldFrame,
    geo: FieldGeometry,
    grid: PotentialGrid | None = None,
    cfg: StrategyConfig | None = None,
) -> RoleAssignment:
    """Assign each requested role to the friendly robot nearest its anchor."""
    cfg = cfg or StrategyConfig()
    robots = world.ours
    if len(requests) != len(robots):
        raise ValueError(f"{len(requests)} requests for {len(robots)} robots")
    slot_counts: dict[RoleKind, int] = {}
    for req in requests:
        slot_counts[req.kind] = slot_counts.get(req.kind, 0) + 1
    anchored = [
        (req, role_anchor(req, slot_counts[req.kind], world, geo, grid, cfg))
        for req in requests
    ]
    return greedy_by_anchor(anchored, robots)


# ---------------------------------------------------------------------------
# skills


def clear_shot(ball: Vec2, world: WorldFrame, geo: FieldGeometry, cfg: StrategyConfig) -> bool:
    """True when no opposing robot disc blocks the ball-to-goal segment."""
    goal = geo.goal_center(Team.THEIRS)
    block_radius = cfg.params.robot_radius + BALL_RADIUS
    return all(
        point_segment_distance(r.position, ball, goal) >= block_radius
        for r in world.theirs
    )


def _bearing(src: Vec2, dst: Vec2) -> float:
    if src == dst:
        return 0.0
    return math.atan2(dst.y - src.y, dst.x - src.x)


def _pass_power(dist: float, cfg: StrategyConfig) -> int:
    """Kick power sized so the ball decelerates to rest near the aim point.

    Rounded down: stopping short leaves a pickable ball, while overshooting
    near the boundary rolls it out of play.
    """
    v0 = math.sqrt(2.0 * cfg.ball_friction * dist)
    power = math.floor(100.0 * v0 / cfg.kick_speed_max)
    return min(max(power, cfg.pass_power_min), cfg.pass_power_max)


def _goalie_skill(robot, world, geo, cfg):
    mouth_a, mouth_b = geo.goal_mouth(Team.OURS)
    half_gw = geo.goal_width / 2.0
    # track the ball laterally along the goal line, clamped to the mouth
    y = min(max(world.ball.position.y, mouth_a.y), mouth_b.y)
    target = Vec2(mouth_a.x, min(max(y, -half_gw), half_gw))
    return MotionTarget(Pose(target, _bearing(target, world.ball.position)))


def _attacker_skill(robot, world, phase, grid, geo, cfg):
    ball = world.ball.position
    if not robot.ball_contact:
        dribble = cfg.dribble_hold if robot.position.dist(ball) < cfg.approach_dribble_range else 0
        return MotionTarget(Pose(ball, _bearing(robot.position, ball)), 0, dribble)
    if clear_shot(ball, world, geo, cfg):
        aim = geo.goal_center(Team.THEIRS)
        power = cfg.shot_power
    elif grid is not None:
        aim = best_cell(grid, [], geo)
        power = _pass_power(ball.dist(aim), cfg)
    else:
        aim = geo.goal_center(Team.THEIRS)  # no grid: clear downfield
        power = cfg.shot_power
    yaw = _bearing(robot.position, aim)
    aligned = abs(wrap_angle(yaw - robot.yaw)) < cfg.align_tolerance
    kick = power if (aligned and phase is GamePhase.RUN) else 0
    return MotionTarget(Pose(robot.position, yaw), kick, cfg.dribble_hold)


def _defender_skill(robot, slot, n_slots, world, geo, cfg):
    s_center = _perimeter_crossing(geo, world.ball.position)
    s = s_center + cfg.defender_spacing * (slot - (n_slots - 1) / 2.0)
    target = _perimeter_point(geo, s, cfg.defender_offset)
    return MotionTarget(Pose(target, _bearing(target, world.ball.position)))


def _receiver_skill(robot, slot, world, grid, geo, cfg):
    if grid is None:
        raise ValueError("pass grid required for PassReceiver")
    cells = top_cells(grid, slot + 1, cfg.receiver_separation, [], geo)
    if not cells:
        raise ValueError("no feasible cell")
    target = cells[min(slot, len(cells) - 1)]
    yaw = _bearing(target, world.ball.position)
    return MotionTarget(Pose(target, yaw), 0, cfg.dribble_hold)


def _interrupter_skill(robot, slot, world, geo, cfg):
    marked = _marked_opponent(world, geo, slot)
    ball = world.ball.position
    if marked is None:
        target = (geo.goal_center(Team.OURS) + ball) * 0.5
    else:
        target = (marked.position + ball) * 0.5
    return MotionTarget(Pose(target, _bearing(target, ball)))


def _waiter_skill(robot, world, grid, geo, cfg):
    if grid is None:
        raise ValueError("pass grid required for Waiter")
    others = [r.position for r in world.robots if not (r.team is robot.team and r.id == robot.id)]
    crowding = crowd_mask(grid.spec, others, 1.0)
    anchor = _waiter_anchor(world, geo)
    cx, cy = grid.spec.centers()
    # epsilon anchor-distance term breaks ties among equally open cells
    tiebreak = -1e-6 * ((cx - anchor.x) ** 2 + (cy - anchor.y) ** 2) ** 0.5
    target = best_cell(PotentialGrid(grid.spec, crowding + tiebreak), [], geo)
    return MotionTarget(Pose(target, _bearing(target, world.ball.position)))


def run_role(
    kind: RoleKind,
    slot: int,
    robot: RobotState,
    world: WorldFrame,
    phase: GamePhase,
    grid: PotentialGrid | None,
    geo: FieldGeometry,
    cfg: StrategyConfig | None = None,
    n_slots: int = 1,
) -> MotionTarget:
    """Run one role's skill; returns the motion target for this frame."""
    if robot.team is not Team.OURS:
        raise ValueError("skills run for our robots only")
    cfg = cfg or StrategyConfig()
    if kind is RoleKind.GOALIE:
        target = _goalie_skill(robot, world, geo, cfg)
    elif kind is RoleKind.ATTACKER:
        target = _attacker_skill(robot, world, phase, grid, geo, cfg)
    elif kind is RoleKind.DEFENDER:
        target = _defender_skill(robot, slot, n_slots, world, geo, cfg)
    elif kind is RoleKind.PASS_RECEIVER:
        target = _receiver_skill(robot, slot, world, grid, geo, cfg)
    elif kind is RoleKind.PASS_INTERRUPTER:
        target = _interrupter_skill(robot, slot, world, geo, cfg)
    else:
        target = _waiter_skill(robot, world, grid, geo, cfg)
    return _shape_for_phase(target, robot, world, phase, geo)


def _shape_for_phase(
    target: MotionTarget,
    robot: RobotState,
    world: WorldFrame,
    phase: GamePhase,
    geo: FieldGeometry,
) -> MotionTarget:
    """Phase hygiene: clamp into the field, stage kickoffs in our half, cap
    urgency and kicking outside RUN."""
    pos = geo.clamp(target.target.position)
    kick = target.kick_power
    urgency = target.urgency
    if phase in (GamePhase.PREPARE_KICKOFF_US, GamePhase.PREPARE_KICKOFF_THEM):
        ball = world.ball.position
        stage_x = -0.5 if phase is GamePhase.PREPARE_KICKOFF_US else -1.0
        if pos.x > -0.2:
            pos = Vec2(min(pos.x, ball.x + stage_x), pos.y)
        kick = 0
    if phase is GamePhase.STOP:
        urgency = "stop_phase"
        kick = 0
    if phase is not GamePhase.RUN:
        kick = 0
    return MotionTarget(Pose(pos, target.target.yaw), kick, target.dribble_power, urgency)
