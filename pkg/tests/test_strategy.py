import math
import random

import numpy as np
import pytest

from playmaker.potential import GridSpec, PotentialGrid
from playmaker.strategy import (
    MotionTarget,
    RoleAssignment,
    RoleKind,
    RoleRequest,
    StrategyConfig,
    assign_roles,
    clear_shot,
    greedy_by_anchor,
    role_anchor,
    run_role,
    select_role_set,
    we_possess,
)
from playmaker.world import (
    BallState,
    FieldGeometry,
    GamePhase,
    Pose,
    RobotState,
    Team,
    Vec2,
    WorldFrame,
    in_penalty_area,
    point_segment_distance,
)

GEO = FieldGeometry()
CFG = StrategyConfig()
SPEC = GridSpec.for_field(GEO, 0.1)


def _robot(rid, x, y, team=Team.OURS, yaw=0.0, contact=False):
    return RobotState(rid, team, Pose(Vec2(x, y), yaw), ball_contact=contact)


def _world(ours, theirs=(), ball=Vec2(0, 0)):
    return WorldFrame(1, 0.0, BallState(ball), tuple(ours) + tuple(theirs))


def _uniform_grid():
    return PotentialGrid(SPEC, np.ones(SPEC.shape))


class TestSelectRoleSet:
    def test_single_robot_is_goalie(self):
        w = _world([_robot(0, -4, 0)])
        reqs = select_role_set(w, GamePhase.RUN, 1)
        assert [r.kind for r in reqs] == [RoleKind.GOALIE]
        assert reqs[0].priority == 0

    def test_six_attacking(self):
        ours = [_robot(i, -i, 0) for i in range(6)]
        theirs = [_robot(i, 4, i, Team.THEIRS) for i in range(6)]
        w = _world(ours, theirs, ball=Vec2(-0.5, 0))  # our robot nearest
        kinds = [r.kind for r in select_role_set(w, GamePhase.RUN, 6)]
        assert kinds == [RoleKind.GOALIE, RoleKind.ATTACKER, RoleKind.DEFENDER,
                         RoleKind.DEFENDER, RoleKind.PASS_RECEIVER, RoleKind.PASS_RECEIVER]

    def test_six_defending(self):
        ours = [_robot(i, -4, i) for i in range(6)]
        theirs = [_robot(i, 0.2, 0, Team.THEIRS) for i in range(1)]
        w = _world(ours, theirs, ball=Vec2(0.3, 0))  # their robot nearest
        kinds = [r.kind for r in select_role_set(w, GamePhase.RUN, 6)]
        assert kinds == [RoleKind.GOALIE, RoleKind.ATTACKER, RoleKind.DEFENDER,
                         RoleKind.DEFENDER, RoleKind.PASS_INTERRUPTER,
                         RoleKind.PASS_INTERRUPTER]

    def test_extras_become_waiters(self):
        w = _world([_robot(i, -i, 0) for i in range(8)])
        kinds = [r.kind for r in select_role_set(w, GamePhase.RUN, 8)]
        assert kinds.count(RoleKind.WAITER) == 2
        assert kinds[-1] is RoleKind.WAITER

    def test_priorities_strictly_ordered(self):
        w = _world([_robot(i, -i, 0) for i in range(7)])
        reqs = select_role_set(w, GamePhase.RUN, 7)
        priorities = [r.priority for r in reqs]
        assert priorities == sorted(priorities)
        assert len(set(priorities)) == len(priorities)

    def test_zero_robots(self):
        w = _world([])
        assert select_role_set(w, GamePhase.RUN, 0) == []

    def test_slots_count_up(self):
        w = _world([_robot(i, -i, 0) for i in range(6)])
        reqs = select_role_set(w, GamePhase.RUN, 6)
        defenders = [r.slot for r in reqs if r.kind is RoleKind.DEFENDER]
        assert defenders == [0, 1]


class TestPosession:
    def test_contact_wins(self):
        w = _world([_robot(0, 4, 0, contact=True)],
                   [_robot(0, 0.1, 0, Team.THEIRS)], ball=Vec2(0, 0))
        assert we_possess(w)

    def test_nearest_decides(self):
        w = _world([_robot(0, 1, 0)], [_robot(0, 2, 0, Team.THEIRS)], ball=Vec2(0, 0))
        assert we_possess(w)
        w = _world([_robot(0, 3, 0)], [_robot(0, 2, 0, Team.THEIRS)], ball=Vec2(0, 0))
        assert not we_possess(w)


class TestAssignRoles:
    def test_single_forced(self):
        w = _world([_robot(3, 1, 1)])
        out = assign_roles([RoleRequest(RoleKind.GOALIE, 0)], w, GEO)
        assert out.by_robot == {3: (RoleKind.GOALIE, 0)}

    def test_goalie_near_goal_attacker_near_ball(self):
        w = _world([_robot(0, -4, 0), _robot(1, 0, 0)], ball=Vec2(1, 0))
        reqs = [RoleRequest(RoleKind.GOALIE, 0), RoleRequest(RoleKind.ATTACKER, 1)]
        out = assign_roles(reqs, w, GEO)
        assert out.by_robot[0] == (RoleKind.GOALIE, 0)
        assert out.by_robot[1] == (RoleKind.ATTACKER, 0)

    def test_equidistant_lower_id_wins(self):
        w = _world([_robot(2, 0, 1), _robot(5, 0, -1)], ball=Vec2(0, 0))
        reqs = [RoleRequest(RoleKind.GOALIE, 0), RoleRequest(RoleKind.ATTACKER, 1)]
        out = assign_roles(reqs, w, GEO)
        assert out.by_robot[2][0] is RoleKind.GOALIE

    def test_bijection_over_random_worlds(self):
        rng = random.Random(31)
        for _ in range(200):
            n = rng.randint(1, 8)
            ours = [_robot(i, rng.uniform(-4, 4), rng.uniform(-3, 3)) for i in range(n)]
            theirs = [_robot(i, rng.uniform(-4, 4), rng.uniform(-3, 3), Team.THEIRS)
                      for i in range(rng.randint(0, 8))]
            ball = Vec2(rng.uniform(-4, 4), rng.uniform(-3, 3))
            w = _world(ours, theirs, ball)
            phase = rng.choice(list(GamePhase))
            reqs = select_role_set(w, phase, n)
            out = assign_roles(reqs, w, GEO, _uniform_grid())
            assert sorted(out.by_robot) == sorted(r.id for r in ours)
            kinds = [k for k, _ in out.by_robot.values()]
            assert kinds.count(RoleKind.ATTACKER) <= 1
            assert kinds.count(RoleKind.GOALIE) == 1

    def test_translation_invariance_of_greedy_core(self):
        rng = random.Random(8)
        for _ in range(100):
            n = rng.randint(1, 8)
            robots = [_robot(i, rng.uniform(-4, 4), rng.uniform(-3, 3)) for i in range(n)]
            kinds = [RoleKind.GOALIE] + [RoleKind.WAITER] * (n - 1)
            anchored = [
                (RoleRequest(kind, i, slot=i if kind is RoleKind.WAITER else 0),
                 Vec2(rng.uniform(-4, 4), rng.uniform(-3, 3)))
                for i, kind in enumerate(kinds)
            ]
            shift = Vec2(rng.uniform(-10, 10), rng.uniform(-10, 10))
            moved_robots = [
                RobotState(r.id, r.team, Pose(r.position + shift, r.yaw))
                for r in robots
            ]
            moved_anchored = [(req, anchor + shift) for req, anchor in anchored]
            a = greedy_by_anchor(anchored, robots)
            b = greedy_by_anchor(moved_anchored, moved_robots)
            assert a.by_robot == b.by_robot

    def test_request_count_mismatch_rejected(self):
        w = _world([_robot(0, 0, 0)])
        with pytest.raises(ValueError):
            assign_roles([], w, GEO)

    def test_assignment_invariants_enforced(self):
        with pytest.raises(ValueError):
            RoleAssignment({0: (RoleKind.ATTACKER, 0), 1: (RoleKind.ATTACKER, 0),
                            2: (RoleKind.GOALIE, 0)})
        with pytest.raises(ValueError):
            RoleAssignment({0: (RoleKind.WAITER, 0)})


class TestGoalieSkill:
    def test_collinear_ball(self):
        robot = _robot(0, -4.3, 0)
        w = _world([robot], ball=Vec2(0, 0))
        t = run_role(RoleKind.GOALIE, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.target.position == Vec2(-4.5, 0.0)

    def test_tracks_ball_clamped_to_mouth(self):
        robot = _robot(0, -4.3, 0)
        w = _world([robot], ball=Vec2(0, 2.5))
        t = run_role(RoleKind.GOALIE, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.target.position.x == pytest.approx(-4.5)
        assert abs(t.target.position.y) <= GEO.goal_width / 2

    def test_always_within_goal_mouth(self):
        rng = random.Random(4)
        robot = _robot(0, -4.3, 0)
        for _ in range(100):
            w = _world([robot], ball=Vec2(rng.uniform(-4.5, 4.5), rng.uniform(-3, 3)))
            t = run_role(RoleKind.GOALIE, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
            a, b = GEO.goal_mouth(Team.OURS)
            assert point_segment_distance(t.target.position, a, b) < 1e-9


class TestAttackerSkill:
    def test_approaches_ball_without_contact(self):
        robot = _robot(0, 0, 0)
        w = _world([robot], ball=Vec2(2, 1))
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.target.position == Vec2(2, 1)
        assert t.kick_power == 0

    def test_shoots_when_clear_and_aligned(self):
        robot = _robot(0, 1, 0, yaw=0.0, contact=True)
        w = _world([robot], ball=Vec2(1.1, 0))
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.kick_power > 0
        goal_bearing = math.atan2(0.0 - 0.0, 4.5 - 1.0)
        assert t.target.yaw == pytest.approx(goal_bearing, abs=1e-9)

    def test_holds_fire_until_aligned(self):
        robot = _robot(0, 1, 0, yaw=2.0, contact=True)
        w = _world([robot], ball=Vec2(1.1, 0))
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.kick_power == 0
        assert t.dribble_power > 0

    def test_passes_to_best_cell_when_blocked(self):
        robot = _robot(0, 1, 0, yaw=0.0, contact=True)
        blocker = _robot(0, 2.5, 0, Team.THEIRS)
        scores = np.zeros(SPEC.shape)
        scores[10, 45] = 3.0
        grid = PotentialGrid(SPEC, scores)
        w = _world([robot], [blocker], ball=Vec2(1.1, 0))
        best = SPEC.cell_center(10, 45)
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.RUN, grid, GEO, CFG)
        assert t.target.yaw == pytest.approx(math.atan2(best.y - 0.0, best.x - 1.0))

    def test_no_kick_outside_run(self):
        robot = _robot(0, 1, 0, yaw=0.0, contact=True)
        w = _world([robot], ball=Vec2(1.1, 0))
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.STOP, None, GEO, CFG)
        assert t.kick_power == 0
        assert t.urgency == "stop_phase"


class TestClearShot:
    def test_open_goal(self):
        w = _world([], [], ball=Vec2(0, 0))
        assert clear_shot(Vec2(0, 0), w, GEO, CFG)

    def test_blocker_on_the_line(self):
        w = _world([], [_robot(0, 2, 0, Team.THEIRS)], ball=Vec2(0, 0))
        assert not clear_shot(Vec2(0, 0), w, GEO, CFG)

    def test_blocker_off_the_line(self):
        w = _world([], [_robot(0, 2, 1.5, Team.THEIRS)], ball=Vec2(0, 0))
        assert clear_shot(Vec2(0, 0), w, GEO, CFG)


class TestDefenderSkill:
    def test_outside_area_but_within_a_centimeter(self):
        rng = random.Random(12)
        robot = _robot(0, -3, 0)
        for _ in range(100):
            ball = Vec2(rng.uniform(-4.4, 4.4), rng.uniform(-2.9, 2.9))
            w = _world([robot], ball=ball)
            for slot, n_slots in ((0, 2), (1, 2), (0, 1)):
                t = run_role(RoleKind.DEFENDER, slot, robot, w, GamePhase.RUN,
                             None, GEO, CFG, n_slots=n_slots)
                p = t.target.position
                assert not in_penalty_area(p, Team.OURS, GEO)
                segs = [
                    (Vec2(-4.5, -1.0), Vec2(-3.5, -1.0)),
                    (Vec2(-3.5, -1.0), Vec2(-3.5, 1.0)),
                    (Vec2(-3.5, 1.0), Vec2(-4.5, 1.0)),
                ]
                d = min(point_segment_distance(p, a, b) for a, b in segs)
                assert d <= 0.01

    def test_two_defenders_flank_the_crossing(self):
        robot = _robot(0, -3, 0)
        w = _world([robot], ball=Vec2(0, 0))
        t0 = run_role(RoleKind.DEFENDER, 0, robot, w, GamePhase.RUN, None, GEO, CFG, n_slots=2)
        t1 = run_role(RoleKind.DEFENDER, 1, robot, w, GamePhase.RUN, None, GEO, CFG, n_slots=2)
        gap = t0.target.position.dist(t1.target.position)
        assert gap == pytest.approx(CFG.defender_spacing, abs=0.02)


class TestReceiverSkill:
    def test_takes_argmax_cell(self):
        scores = np.zeros(SPEC.shape)
        scores[60, 30] = 1.0
        grid = PotentialGrid(SPEC, scores)
        robot = _robot(0, 0, 0)
        w = _world([robot], ball=Vec2(0, 0))
        t = run_role(RoleKind.PASS_RECEIVER, 0, robot, w, GamePhase.RUN, grid, GEO, CFG)
        assert t.target.position == SPEC.cell_center(60, 30)

    def test_slots_separated(self):
        rng = np.random.default_rng(2)
        grid = PotentialGrid(SPEC, rng.uniform(0, 1, SPEC.shape))
        robot = _robot(0, 0, 0)
        w = _world([robot], ball=Vec2(0, 0))
        t0 = run_role(RoleKind.PASS_RECEIVER, 0, robot, w, GamePhase.RUN, grid, GEO, CFG)
        t1 = run_role(RoleKind.PASS_RECEIVER, 1, robot, w, GamePhase.RUN, grid, GEO, CFG)
        assert t0.target.position.dist(t1.target.position) >= CFG.receiver_separation

    def test_missing_grid_errors(self):
        robot = _robot(0, 0, 0)
        w = _world([robot], ball=Vec2(0, 0))
        with pytest.raises(ValueError):
            run_role(RoleKind.PASS_RECEIVER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        with pytest.raises(ValueError):
            run_role(RoleKind.WAITER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)


class TestInterrupterSkill:
    def test_midpoint_of_marked_opponent_and_ball(self):
        robot = _robot(0, 0, 0)
        threat = _robot(7, -3, 1, Team.THEIRS)
        far = _robot(8, 3, 1, Team.THEIRS)
        w = _world([robot], [threat, far], ball=Vec2(1, -1))
        t = run_role(RoleKind.PASS_INTERRUPTER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t.target.position == Vec2(-1.0, 0.0)
        t1 = run_role(RoleKind.PASS_INTERRUPTER, 1, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert t1.target.position == Vec2(2.0, 0.0)


class TestWaiterSkill:
    def test_prefers_open_space_in_ball_free_half(self):
        robot = _robot(0, 1, 1)
        crowd = [_robot(i, 0.5 * i - 2, 0.3, Team.THEIRS) for i in range(6)]
        w = _world([robot], crowd, ball=Vec2(3, 0))
        t = run_role(RoleKind.WAITER, 0, robot, w, GamePhase.RUN, _uniform_grid(), GEO, CFG)
        # ball in +x half, so the waiter heads for open space on the -x side
        assert t.target.position.x < 0


class TestMotionTargetShaping:
    def test_targets_clamped_into_field(self):
        robot = _robot(0, 0, 0)
        w = _world([robot], ball=Vec2(10, 10))  # ball reported out of bounds
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.RUN, None, GEO, CFG)
        assert GEO.contains(t.target.position)

    def test_kickoff_staging_keeps_our_half(self):
        robot = _robot(0, 2, 0)
        w = _world([robot], ball=Vec2(0, 0))
        t = run_role(RoleKind.ATTACKER, 0, robot, w, GamePhase.PREPARE_KICKOFF_THEM,
                     None, GEO, CFG)
        assert t.target.position.x <= -0.2
