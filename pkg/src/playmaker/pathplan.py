"""Collision-avoiding polyline planning.

Recursive detour insertion: when the straight segment to the goal cuts
through an inflated obstacle disc, a via point is placed beside the worst
offender, perpendicular to the segment and on the side nearer the field
center, and both halves are planned recursively. Replanning happens every
frame, so the robot only ever chases the first waypoint.

Coordinates are field-centered (origin at the field center), which is what
"side nearer the field center" is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .world import Vec2, point_segment_distance

DEFAULT_MAX_DEPTH = 6

_FIELD_CENTER = Vec2(0.0, 0.0)


class PathBlocked(Exception):
    """Raised when no clear polyline exists within the recursion budget."""


@dataclass(frozen=True)
class PathPolyline:
    waypoints: tuple[Vec2, ...]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("polyline needs at least start and goal")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")

    @property
    def start(self) -> Vec2:
        return self.waypoints[0]

    @property
    def goal(self) -> Vec2:
        return self.waypoints[-1]

    def length(self) -> float:
        return sum(a.dist(b) for a, b in zip(self.waypoints, self.waypoints[1:]))


def _worst_violation(
    a: Vec2,
    b: Vec2,
    obstacles: Sequence[tuple[Vec2, float]],
    margin: float,
) -> tuple[Vec2, float] | None:
    """Deepest intrusion of segment ab into any inflated disc, or None."""
    worst = None
    worst_depth = 0.0
    for center, radius in obstacles:
        depth = (radius + margin) - point_segment_distance(center, a, b)
        if depth > worst_depth:
            worst = (center, radius)
            worst_depth = depth
    return worst


def _detour_point(a: Vec2, b: Vec2, center: Vec2, radius: float, margin: float) -> Vec2:
    seg = (b - a).normalized()
    normal = Vec2(-seg.y, seg.x)
    offset = radius + 2.0 * margin  # inflated radius plus margin again
    left = center + normal * offset
    right = center - normal * offset
    if right.dist(_FIELD_CENTER) < left.dist(_FIELD_CENTER):
        return right
    return left  # nearer, or equidistant: keep the positive-normal side


def _plan(
    a: Vec2,
    b: Vec2,
    obstacles: Sequence[tuple[Vec2, float]],
    margin: float,
    depth: int,
) -> list[Vec2]:
    violation = _worst_violation(a, b, obstacles, margin)
    if violation is None:
        return [a, b]
    if depth == 0:
        raise PathBlocked("path blocked")
    via = _detour_point(a, b, *violation, margin)
    first = _plan(a, via, obstacles, margin, depth - 1)
    second = _plan(via, b, obstacles, margin, depth - 1)
    return first[:-1] + second


def plan_path(
    start: Vec2,
    goal: Vec2,
    obstacles: Sequence[tuple[Vec2, float]],
    margin: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> PathPolyline:
    """Collision-free polyline from start to goal around circular obstacles.

    Obstacles are (center, radius) discs, inflated by margin for the
    clearance test. Raises PathBlocked when the recursion budget runs out
    before every leg is clear, and ValueError on a degenerate request
    (start == goal is the caller's case to handle).
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if start == goal:
        raise ValueError("degenerate path request: start equals goal")
    points = _plan(start, goal, obstacles, margin, max_depth)
    deduped = [points[0]]
    for p in points[1:]:
        if p != deduped[-1]:
            deduped.append(p)
    return PathPolyline(tuple(deduped))
