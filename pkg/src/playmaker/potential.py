"""Grid scoring for pass-position selection.

The field is covered by a rectangular grid of cells. Candidate positions are
scored by summing weighted mask layers over cell centers: a binary shadow
mask that treats the ball as a point light source and zeroes cells occluded
by obstacles, affine gradient masks, and a crowd mask penalizing proximity to
robots. The argmax cell (outside exclusion discs and both penalty areas) is
the chosen position.

Shading is decided against a fixed discretization of the ball-to-cell
segment (SHADOW_SEGMENT_SAMPLES equally spaced points): an obstacle shades a
cell when its distance to the nearest sample point is below the blocker
radius. Because distance along the segment is convex, that minimum sits at
one of the two samples bracketing the continuous minimizer, so it is computed
in closed form rather than by scanning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .world import FieldGeometry, Team, Vec2, in_penalty_area

SHADOW_SEGMENT_SAMPLES = 200


@lru_cache(maxsize=8)
def _centers_cached(spec: "GridSpec") -> tuple[np.ndarray, np.ndarray]:
    xs = spec.origin.x + (np.arange(spec.cols) + 0.5) * spec.cell_size
    ys = spec.origin.y + (np.arange(spec.rows) + 0.5) * spec.cell_size
    cx, cy = np.meshgrid(xs, ys, indexing="ij")
    cx.setflags(write=False)
    cy.setflags(write=False)
    return cx, cy


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a grid: origin is the min corner of the covered rectangle."""

    origin: Vec2
    cell_size: float
    cols: int  # x direction
    rows: int  # y direction

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")
        if self.cols < 1 or self.rows < 1:
            raise ValueError("grid must have at least one cell")

    @classmethod
    def for_field(cls, geo: FieldGeometry, cell_size: float = 0.1) -> "GridSpec":
        cols = max(1, math.ceil(geo.length / cell_size - 1e-9))
        rows = max(1, math.ceil(geo.width / cell_size - 1e-9))
        return cls(Vec2(-geo.half_length, -geo.half_width), cell_size, cols, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.cols, self.rows)

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates as two read-only (cols, rows) arrays."""
        return _centers_cached(self)

    def cell_center(self, col: int, row: int) -> Vec2:
        return Vec2(
            self.origin.x + (col + 0.5) * self.cell_size,
            self.origin.y + (row + 0.5) * self.cell_size,
        )


@dataclass(frozen=True)
class PotentialGrid:
    spec: GridSpec
    scores: np.ndarray  # (cols, rows)

    def __post_init__(self):
        if self.scores.shape != self.spec.shape:
            raise ValueError("scores shape does not match grid spec")
        if not np.isfinite(self.scores).all():
            raise ValueError("scores must be finite")

    def to_row_major(self) -> list[float]:
        """Flatten for the UI snapshot: index = row * cols + col."""
        return self.scores.T.reshape(-1).tolist()


@dataclass(frozen=True)
class MaskSpec:
    """Configuration entry for one layer of the mask stack."""

    kind: str  # shadow | gradient | crowd
    weight: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("shadow", "gradient", "crowd"):
            raise ValueError(f"unknown mask kind: {self.kind!r}")
        if not math.isfinite(self.weight):
            raise ValueError("mask weight must be finite")


def shadow_mask(
    spec: GridSpec,
    ball: Vec2,
    obstacles: Sequence[Vec2],
    r_block: float,
    n_samples: int = SHADOW_SEGMENT_SAMPLES,
) -> np.ndarray:
    """Binary mask: 1 where the cell center sees the ball, 0 where an
    obstacle lying between them comes within r_block of the sight segment.

    An obstacle coincident with the ball shades every other cell.
    """
    if r_block <= 0:
        raise ValueError("r_block must be positive")
    if n_samples < 2:
        raise ValueError("need at least two segment samples")
    cx, cy = spec.centers()
    dx = cx - ball.x
    dy = cy - ball.y
    seg2 = dx * dx + dy * dy
    safe_seg2 = np.where(seg2 > 0.0, seg2, 1.0)
    r2 = r_block * r_block
    lit = np.ones(spec.shape, dtype=bool)
    for obs in obstacles:
        ox = obs.x - ball.x
        oy = obs.y - ball.y
        between = (ox * ox + oy * oy) < seg2
        if not between.any():
            continue
        t_star = np.clip((dx * ox + dy * oy) / safe_seg2, 0.0, 1.0)
        # discrete minimum over the sample grid: the two samples around t_star
        k = np.minimum((t_star * (n_samples - 1)).astype(np.int64), n_samples - 2)
        t_lo = k / (n_samples - 1)
        t_hi = (k + 1) / (n_samples - 1)
        d2_lo = (t_lo * dx - ox) ** 2 + (t_lo * dy - oy) ** 2
        d2_hi = (t_hi * dx - ox) ** 2 + (t_hi * dy - oy) ** 2
        d2_min = np.minimum(d2_lo, d2_hi)
        lit &= ~((d2_min < r2) & between)
    return lit.astype(np.float64)


def gradient_mask(
    spec: GridSpec,
    from_value: float,
    to_value: float,
    direction: Vec2,
) -> np.ndarray:
    """Affine ramp over cell centers projected onto direction: from_value at
    the rearmost cell, to_value at the frontmost."""
    n = direction.norm()
    if n < 1e-12:
        raise ValueError("gradient direction must be nonzero")
    ux, uy = direction.x / n, direction.y / n
    cx, cy = spec.centers()
    proj = cx * ux + cy * uy
    p_min, p_max = proj.min(), proj.max()
    if p_max - p_min < 1e-12:
        # all cells are simultaneously rear and front extreme
        return np.full(spec.shape, (from_value + to_value) / 2.0)
    t = (proj - p_min) / (p_max - p_min)
    return from_value + (to_value - from_value) * t


def crowd_mask(spec: GridSpec, robots: Sequence[Vec2], falloff: float) -> np.ndarray:
    """Negative penalty growing linearly as a cell approaches any robot
    within the falloff radius; 0 in open space."""
    if falloff <= 0:
        raise ValueError("falloff must be positive")
    cx, cy = spec.centers()
    penalty = np.zeros(spec.shape)
    reach = math.ceil(falloff / spec.cell_size) + 1
    for r in robots:
        # only cells inside the falloff box can pick up a penalty
        col = int((r.x - spec.origin.x) / spec.cell_size)
        row = int((r.y - spec.origin.y) / spec.cell_size)
        c0, c1 = max(col - reach, 0), min(col + reach + 1, spec.cols)
        r0, r1 = max(row - reach, 0), min(row + reach + 1, spec.rows)
        if c0 >= c1 or r0 >= r1:
            continue
        d = np.hypot(cx[c0:c1, r0:r1] - r.x, cy[c0:c1, r0:r1] - r.y)
        penalty[c0:c1, r0:r1] += np.maximum(0.0, 1.0 - d / falloff)
    return -penalty


def combine_masks(
    spec: GridSpec,
    masks: Sequence[tuple[np.ndarray, float]],
) -> PotentialGrid:
    """Weighted per-cell sum of mask layers."""
    if not masks:
        raise ValueError("need at least one mask")
    total = np.zeros(spec.shape)
    for grid, weight in masks:
        if grid.shape != spec.shape:
            raise ValueError(f"mask shape {grid.shape} does not match grid {spec.shape}")
        total += weight * grid
    return PotentialGrid(spec, total)


def build_mask(
    mask: MaskSpec,
    spec: GridSpec,
    ball: Vec2,
    obstacles: Sequence[Vec2],
    robots: Sequence[Vec2],
    geo: FieldGeometry,
) -> np.ndarray:
    """Materialize one configured mask layer for the current world."""
    p = mask.params
    if mask.kind == "shadow":
        return shadow_mask(spec, ball, obstacles, p["r_block"])
    if mask.kind == "gradient":
        return gradient_mask(
            spec, p.get("from_value", 0.0), p.get("to_value", 1.0),
            Vec2(*p.get("direction", (1.0, 0.0))),
        )
    return crowd_mask(spec, robots, p.get("falloff", 1.0))


def _feasible(
    grid: PotentialGrid,
    exclusions: Sequence[tuple[Vec2, float]],
    geo: FieldGeometry,
) -> np.ndarray:
    cx, cy = grid.spec.centers()
    ok = np.ones(grid.spec.shape, dtype=bool)
    for center, radius in exclusions:
        ok &= np.hypot(cx - center.x, cy - center.y) >= radius
    # both penalty areas are never pass targets
    half_pw = geo.penalty_width / 2.0
    inner_x = geo.half_length - geo.penalty_depth
    ok &= ~((np.abs(cy) <= half_pw) & (np.abs(cx) >= inner_x) & (np.abs(cx) <= geo.half_length))
    return ok


def best_cell(
    grid: PotentialGrid,
    exclusions: Sequence[tuple[Vec2, float]],
    geo: FieldGeometry,
) -> Vec2:
    """Center of the maximal-score feasible cell; row-major ties go first."""
    cells = top_cells(grid, 1, 0.0, exclusions, geo)
    if not cells:
        raise ValueError("no feasible cell")
    return cells[0]


def top_cells(
    grid: PotentialGrid,
    count: int,
    min_separation: float,
    exclusions: Sequence[tuple[Vec2, float]],
    geo: FieldGeometry,
) -> list[Vec2]:
    """Up to count best cells, greedily enforcing min_separation between
    picks; may return fewer when the grid runs out of feasible cells."""
    ok = _feasible(grid, exclusions, geo)
    # row-major layout so argmax tie-break lands on the lowest row*cols+col
    scores = np.where(ok, grid.scores, -np.inf).T.copy()
    cx, cy = grid.spec.centers()
    picked: list[Vec2] = []
    for _ in range(count):
        idx = int(np.argmax(scores))
        row, col = divmod(idx, grid.spec.cols)
        if not np.isfinite(scores[row, col]):
            break
        center = grid.spec.cell_center(col, row)
        picked.append(center)
        if min_separation > 0.0:
            near = np.hypot(cx - center.x, cy - center.y) < min_separation
            scores[near.T] = -np.inf
        else:
            scores[row, col] = -np.inf
    return picked
