"""Exact belief maintenance over hidden-shape poses.

The belief is the literal set of poses consistent with every observation so
far: no sampling, no weighting. The pose universe is at most
rows * cols * |orientations| entries, so exact enumeration is cheap at any
board size this package targets.

A pose is consistent with an observation map when (a) no opened cell lies on
the pose's cells and (b) every opened cell's recorded count equals the number
of pose cells in its in-bounds 8-neighborhood.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace

import numpy as np

from .errors import BeliefCollapse
from .grid import (
    Cell,
    OpenOutcome,
    Pose,
    ShapeTemplate,
    enumerate_poses,
    neighbors8,
    shape_cells,
)


@functools.lru_cache(maxsize=65536)
def _neighbor_set(cell: Cell, rows: int, cols: int) -> frozenset[Cell]:
    return frozenset(neighbors8(cell, rows, cols))


def is_consistent(
    pose: Pose,
    opened: dict[Cell, OpenOutcome],
    template: ShapeTemplate,
    rows: int,
    cols: int,
) -> bool:
    """True iff `pose` explains every opened cell (mine-free + exact counts)."""
    cells = shape_cells(template, pose)
    for cell, outcome in opened.items():
        if cell in cells:
            return False
        if len(cells & _neighbor_set(cell, rows, cols)) != outcome.count:
            return False
    return True


@dataclass(frozen=True)
class HypothesisSet:
    """Ordered pose set (order inherited from enumeration) plus board context.

    `generation` counts how many filters produced this set.
    """

    poses: tuple[Pose, ...]
    template: ShapeTemplate
    rows: int
    cols: int
    generation: int = 0

    def __len__(self) -> int:
        return len(self.poses)

    def __contains__(self, pose: Pose) -> bool:
        return pose in self.poses

    def to_payload(self) -> list[dict]:
        """Serializable pose list for transcripts and UI overlays."""
        return [{"r": p.row, "c": p.col, "orient": p.orient} for p in self.poses]


def build_hypothesis_set(
    opened: dict[Cell, OpenOutcome],
    template: ShapeTemplate,
    rows: int,
    cols: int,
    orientations: tuple[int, ...] = (0,),
    dedupe_cells: bool = True,
) -> HypothesisSet:
    """Filter the full pose universe by consistency with `opened`.

    With `dedupe_cells` (the default) poses whose cell sets coincide with an
    earlier pose collapse to the first occurrence, so a symmetric shape can
    still be pinned down to a single hypothesis.
    """
    universe = enumerate_poses(rows, cols, template, tuple(orientations))
    seen: set[frozenset[Cell]] = set()
    poses = []
    for pose in universe:
        if dedupe_cells:
            cells = shape_cells(template, pose)
            if cells in seen:
                continue
            seen.add(cells)
        if is_consistent(pose, opened, template, rows, cols):
            poses.append(pose)
    return HypothesisSet(poses=tuple(poses), template=template, rows=rows, cols=cols)


def filter_incremental(h: HypothesisSet, cell: Cell, outcome: OpenOutcome) -> HypothesisSet:
    """Retain the poses of `h` consistent with the one new observation."""
    if outcome.is_mine:
        raise ValueError("mine openings end the episode; they are never filtered on")
    nbhd = _neighbor_set(cell, h.rows, h.cols)
    kept = []
    for pose in h.poses:
        cells = shape_cells(h.template, pose)
        if cell in cells:
            continue
        if len(cells & nbhd) != outcome.count:
            continue
        kept.append(pose)
    if not kept:
        raise BeliefCollapse(
            f"observation {cell} -> {outcome.count} eliminated every hypothesis "
            f"(generation {h.generation})"
        )
    return replace(h, poses=tuple(kept), generation=h.generation + 1)


def occupancy_map(h: HypothesisSet) -> np.ndarray:
    """Per-cell fraction of hypotheses covering the cell, shape (rows, cols)."""
    if len(h) == 0:
        raise BeliefCollapse("occupancy of an empty hypothesis set")
    m = np.zeros((h.rows, h.cols), dtype=float)
    for pose in h.poses:
        for r, c in shape_cells(h.template, pose):
            m[r, c] += 1.0
    m /= len(h)
    return m
