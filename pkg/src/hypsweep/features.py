"""Inverse-distance features over the belief, and 3x3 local templates.

The feature map scores every board cell by its closeness to hypothesis mass.
Default variant ("accumulate"): each cell accumulates occupancy weight from
every support cell, attenuated by 1/(1 + Chebyshev distance), then the map is
normalized so its maximum is exactly 1. Chebyshev distance matches the
8-connected action space. An alternative "nearest" variant scores
1/(1 + distance to the nearest support cell) and exists for ablation.

A local template is the row-major 3x3 window of the feature map centered on a
cell; positions outside the board read 0 (off-board is maximally far).
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import BeliefCollapse, OutOfBounds
from .grid import Cell, in_bounds

FEATURE_VARIANTS = ("accumulate", "nearest")


@functools.lru_cache(maxsize=64)
def _chebyshev_matrix(rows: int, cols: int) -> np.ndarray:
    """Pairwise Chebyshev distances between all cells, shape (N, N)."""
    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    coords = np.stack([rr.ravel(), cc.ravel()], axis=1)
    dr = np.abs(coords[:, None, 0] - coords[None, :, 0])
    dc = np.abs(coords[:, None, 1] - coords[None, :, 1])
    return np.maximum(dr, dc).astype(float)


def idt_feature_map(occupancy: np.ndarray, variant: str = "accumulate") -> np.ndarray:
    """Inverse-distance-transform scores in (0, 1], max exactly 1.

    `occupancy` is the hypothesis occupancy map (rows, cols).
    """
    if variant not in FEATURE_VARIANTS:
        raise ValueError(f"unknown feature variant {variant!r}")
    occ = np.asarray(occupancy, dtype=float)
    if occ.sum() <= 0.0:
        raise BeliefCollapse("feature map requires a non-empty hypothesis set")
    rows, cols = occ.shape
    dist = _chebyshev_matrix(rows, cols)
    if variant == "accumulate":
        raw = (1.0 / (1.0 + dist)) @ occ.ravel()
    else:
        support = occ.ravel() > 0.0
        dmin = dist[:, support].min(axis=1)
        raw = 1.0 / (1.0 + dmin)
    raw = raw.reshape(rows, cols)
    return raw / raw.max()


def extract_template(feature_map: np.ndarray, cell: Cell) -> np.ndarray:
    """Row-major 3x3 window of scores centered at `cell`; off-board reads 0."""
    rows, cols = feature_map.shape
    if not in_bounds(cell, rows, cols):
        raise OutOfBounds(f"cell {cell} outside {rows}x{cols} feature map")
    out = np.zeros(9, dtype=float)
    r0, c0 = cell
    for i, dr in enumerate((-1, 0, 1)):
        for j, dc in enumerate((-1, 0, 1)):
            r, c = r0 + dr, c0 + dc
            if 0 <= r < rows and 0 <= c < cols:
                out[i * 3 + j] = feature_map[r, c]
    return out
