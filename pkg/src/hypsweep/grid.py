"""Deterministic game world: boards, hidden shape templates, observations.

A hidden shape (a set of mine cells) is placed somewhere on a rectangular
grid. Opening a non-mine cell reveals how many mine cells sit in its
8-connected neighborhood; opening a mine cell ends the episode immediately.
The module owns the episode lifecycle and nothing about beliefs or policies.

Coordinates are (row, col) tuples with row 0 at the top. The 8 compass
directions share one fixed global order; index 8 is the terminal
"declare found" action.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import AlreadyOpened, EmptyUniverse, EpisodeOver, OutOfBounds

Cell = tuple[int, int]
Offset = tuple[int, int]

DIRECTION_NAMES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
DIRECTION_VECTORS: tuple[Offset, ...] = (
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
)
TERMINAL_ACTION = 8
ALL_ORIENTATIONS = (0, 90, 180, 270)


class Status(str, enum.Enum):
    RUNNING = "running"
    SUCCESS = "success"
    FAILED_MINE = "failed_mine"
    FAILED_STALLED = "failed_stalled"
    FAILED_STEP_CAP = "failed_step_cap"

    @property
    def terminal(self) -> bool:
        return self is not Status.RUNNING


def in_bounds(cell: Cell, rows: int, cols: int) -> bool:
    return 0 <= cell[0] < rows and 0 <= cell[1] < cols


def neighbors8(cell: Cell, rows: int, cols: int) -> list[Cell]:
    """In-bounds 8-connected neighbors, in the fixed direction order."""
    r, c = cell
    out = []
    for dr, dc in DIRECTION_VECTORS:
        n = (r + dr, c + dc)
        if in_bounds(n, rows, cols):
            out.append(n)
    return out


def direction_class(src: Cell, dst: Cell) -> int | None:
    """Direction index of the move src -> dst, or None if not 8-adjacent."""
    d = (dst[0] - src[0], dst[1] - src[1])
    try:
        return DIRECTION_VECTORS.index(d)
    except ValueError:
        return None


@dataclass(frozen=True)
class ShapeTemplate:
    """Hidden-object model: a named set of cell offsets from a (0,0) anchor.

    Offsets are normalized: min row offset and min col offset are both 0.
    """

    name: str
    offsets: frozenset[Offset]

    def __post_init__(self):
        if not self.offsets:
            raise ValueError("template needs at least one offset")
        if min(r for r, _ in self.offsets) != 0 or min(c for _, c in self.offsets) != 0:
            raise ValueError("offsets must be normalized to min row = min col = 0")

    @property
    def height(self) -> int:
        return max(r for r, _ in self.offsets) + 1

    @property
    def width(self) -> int:
        return max(c for _, c in self.offsets) + 1

    @classmethod
    def parse(cls, text: str) -> "ShapeTemplate":
        """Parse the plain-text format: name line, then '#'/'.' grid rows."""
        lines = [ln.rstrip("\n") for ln in text.strip().splitlines()]
        if len(lines) < 2:
            raise ValueError("template text needs a name line and grid rows")
        name = lines[0].strip()
        offsets = set()
        for r, row in enumerate(lines[1:]):
            for c, ch in enumerate(row):
                if ch == "#":
                    offsets.add((r, c))
                elif ch != ".":
                    raise ValueError(f"bad template character {ch!r}")
        return cls(name=name, offsets=frozenset(offsets))

    @classmethod
    def load(cls, path) -> "ShapeTemplate":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def to_text(self) -> str:
        rows = [["."] * self.width for _ in range(self.height)]
        for r, c in self.offsets:
            rows[r][c] = "#"
        return "\n".join([self.name] + ["".join(row) for row in rows]) + "\n"


# Default hidden shape: 7 cells forming an H in a 3x3 bounding box.
H3 = ShapeTemplate(
    name="H3",
    offsets=frozenset({(0, 0), (1, 0), (2, 0), (1, 1), (0, 2), (1, 2), (2, 2)}),
)

BUILTIN_TEMPLATES = {"H3": H3}


class Pose(NamedTuple):
    """Placement of the hidden shape: anchor cell plus quarter-turn orientation."""

    row: int
    col: int
    orient: int = 0


@functools.lru_cache(maxsize=4096)
def rotated_offsets(template: ShapeTemplate, orient: int) -> frozenset[Offset]:
    """Template offsets after `orient` degrees of clockwise rotation.

    One quarter turn maps (dr, dc) -> (dc, maxDr - dr), then offsets are
    re-normalized to a non-negative bounding box.
    """
    if orient not in ALL_ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ALL_ORIENTATIONS}, got {orient}")
    offs = set(template.offsets)
    for _ in range(orient // 90):
        max_dr = max(r for r, _ in offs)
        offs = {(c, max_dr - r) for r, c in offs}
        min_r = min(r for r, _ in offs)
        min_c = min(c for _, c in offs)
        offs = {(r - min_r, c - min_c) for r, c in offs}
    return frozenset(offs)


@functools.lru_cache(maxsize=65536)
def shape_cells(template: ShapeTemplate, pose: Pose) -> frozenset[Cell]:
    """Board cells covered by the template placed at `pose`."""
    return frozenset(
        (pose.row + r, pose.col + c) for r, c in rotated_offsets(template, pose.orient)
    )


@functools.lru_cache(maxsize=1024)
def enumerate_poses(
    rows: int,
    cols: int,
    template: ShapeTemplate,
    orientations: tuple[int, ...] = (0,),
) -> tuple[Pose, ...]:
    """Every pose whose cells fit on the board.

    Deterministic order: orientation-major (ascending degrees), then
    row-major anchors. Symmetric orientations that land on identical cell
    sets are kept; deduplication is the belief layer's concern.
    """
    poses = []
    for orient in sorted(set(orientations)):
        offs = rotated_offsets(template, orient)
        h = max(r for r, _ in offs) + 1
        w = max(c for _, c in offs) + 1
        for ar in range(rows - h + 1):
            for ac in range(cols - w + 1):
                poses.append(Pose(ar, ac, orient))
    if not poses:
        raise EmptyUniverse(
            f"no {template.name} pose fits a {rows}x{cols} board "
            f"with orientations {tuple(sorted(orientations))}"
        )
    return tuple(poses)


@dataclass(frozen=True)
class OpenOutcome:
    """Result of opening one cell: a mine, or the neighborhood mine count."""

    kind: str  # "mine" | "count"
    count: int | None = None

    @property
    def is_mine(self) -> bool:
        return self.kind == "mine"

    @classmethod
    def mine(cls) -> "OpenOutcome":
        return cls(kind="mine")

    @classmethod
    def of_count(cls, k: int) -> "OpenOutcome":
        if not 0 <= k <= 8:
            raise ValueError(f"count must be in [0, 8], got {k}")
        return cls(kind="count", count=k)


@dataclass
class EpisodeState:
    """Mutable per-episode world state. Single-owner; mutated sequentially.

    `ground_truth` and `mines` are hidden information: only the world engine
    and the scripted oracle may read them.
    """

    rows: int
    cols: int
    template: ShapeTemplate
    ground_truth: Pose
    opened: dict[Cell, OpenOutcome] = field(default_factory=dict)
    agent_cell: Cell | None = None
    steps: int = 0
    status: Status = Status.RUNNING
    mines: frozenset[Cell] = field(default=frozenset())

    def __post_init__(self):
        if self.rows < 3 or self.cols < 3:
            raise ValueError("board must be at least 3x3")
        if not self.mines:
            self.mines = shape_cells(self.template, self.ground_truth)
        if not all(in_bounds(c, self.rows, self.cols) for c in self.mines):
            raise ValueError(f"ground-truth pose {self.ground_truth} does not fit the board")


def true_count(cell: Cell, state: EpisodeState) -> int:
    """Ground-truth mine count in the in-bounds 8-neighborhood of `cell`."""
    return sum(1 for n in neighbors8(cell, state.rows, state.cols) if n in state.mines)


def open_cell(state: EpisodeState, cell: Cell) -> OpenOutcome:
    """Open `cell`: record its count, or end the episode on a mine.

    Precondition violations (episode over, out of bounds, already opened)
    raise without touching state. A mine open flips status to FAILED_MINE and
    changes nothing else; a count open records the outcome, moves the agent
    onto the cell, and counts one step.
    """
    if state.status is not Status.RUNNING:
        raise EpisodeOver(f"episode already {state.status.value}")
    if not in_bounds(cell, state.rows, state.cols):
        raise OutOfBounds(f"cell {cell} outside {state.rows}x{state.cols} board")
    if cell in state.opened:
        raise AlreadyOpened(f"cell {cell} already opened")
    if cell in state.mines:
        state.status = Status.FAILED_MINE
        return OpenOutcome.mine()
    outcome = OpenOutcome.of_count(true_count(cell, state))
    state.opened[cell] = outcome
    state.agent_cell = cell
    state.steps += 1
    return outcome


def start_episode_at(
    rows: int,
    cols: int,
    template: ShapeTemplate,
    ground_truth: Pose,
    initial_cell: Cell,
) -> EpisodeState:
    """Episode with a fixed initial reveal (replay/service path).

    The free initial reveal records an observation but counts zero steps.
    """
    state = EpisodeState(rows=rows, cols=cols, template=template, ground_truth=ground_truth)
    if not in_bounds(initial_cell, rows, cols):
        raise OutOfBounds(f"initial cell {initial_cell} outside board")
    if initial_cell in state.mines:
        raise ValueError(f"initial cell {initial_cell} is a mine cell")
    state.opened[initial_cell] = OpenOutcome.of_count(true_count(initial_cell, state))
    state.agent_cell = initial_cell
    return state


def init_episode(
    rows: int,
    cols: int,
    template: ShapeTemplate,
    ground_truth: Pose,
    rng_seed: int,
) -> EpisodeState:
    """Fresh episode with one uniformly random safe cell revealed for free.

    Rejection sampling over the full grid with a seeded generator: identical
    seeds and configs replay to the identical initial cell.
    """
    rng = np.random.default_rng(rng_seed)
    mines = shape_cells(template, ground_truth)
    if len(mines) >= rows * cols:
        raise ValueError("no safe cell exists")
    while True:
        cell = (int(rng.integers(rows)), int(rng.integers(cols)))
        if cell not in mines:
            return start_episode_at(rows, cols, template, ground_truth, cell)
