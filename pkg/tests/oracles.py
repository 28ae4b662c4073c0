"""Independent brute-force oracles shared by module and acceptance tests.

These deliberately recompute results by literal definitions (sampling,
exhaustive scans, dense stepping) rather than reusing any production code
path beyond plain data types.
"""

import numpy as np

from playmaker.potential import GridSpec, PotentialGrid
from playmaker.world import FieldGeometry, Team, Vec2, in_penalty_area


def shadow_oracle(spec: GridSpec, ball: Vec2, obstacles, r_block: float,
                  n_samples: int = 200) -> np.ndarray:
    """Literal segment-sampling shadow: a cell is dark when some obstacle
    sitting between the ball and the cell comes within r_block of any of
    n_samples equally spaced points on the ball-to-cell segment.

    The sample axis is broadcast, but every one of the n_samples points is
    distance-tested for disc membership; nothing is solved in closed form.
    """
    cx, cy = spec.centers()
    dx = cx - ball.x
    dy = cy - ball.y
    seg2 = dx * dx + dy * dy
    lit = np.ones(spec.shape, dtype=bool)
    ts = np.linspace(0.0, 1.0, n_samples).reshape(-1, 1, 1)
    for obs in obstacles:
        ox = obs.x - ball.x
        oy = obs.y - ball.y
        between = (ox * ox + oy * oy) < seg2
        d2 = (ts * dx[None] - ox) ** 2 + (ts * dy[None] - oy) ** 2
        inside_any = (d2 < r_block * r_block).any(axis=0)
        lit &= ~(inside_any & between)
    return lit.astype(np.float64)


def best_cell_scan(grid: PotentialGrid, exclusions, geo: FieldGeometry):
    """Exhaustive row-major scan with strict improvement, mirroring the
    documented tie-break; returns None when nothing is feasible."""
    best = None
    best_score = -np.inf
    for row in range(grid.spec.rows):
        for col in range(grid.spec.cols):
            c = grid.spec.cell_center(col, row)
            if any(c.dist(center) < radius for center, radius in exclusions):
                continue
            if in_penalty_area(c, Team.OURS, geo) or in_penalty_area(c, Team.THEIRS, geo):
                continue
            score = float(grid.scores[col, row])
            if score > best_score:
                best_score = score
                best = c
    return best


def polyline_min_slack(waypoints, obstacles, margin: float, step: float = 0.01) -> float:
    """Worst clearance slack of a densely sampled path: the minimum over
    samples and obstacles of dist(sample, center) - (radius + margin).
    Samples every `step` meters plus both endpoints of each segment."""
    min_slack = np.inf
    for a, b in zip(waypoints, waypoints[1:]):
        length = a.dist(b)
        n = max(2, int(np.ceil(length / step)) + 1)
        for i in range(n):
            t = i / (n - 1)
            p = Vec2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
            for center, radius in obstacles:
                min_slack = min(min_slack, p.dist(center) - (radius + margin))
    return float(min_slack)
