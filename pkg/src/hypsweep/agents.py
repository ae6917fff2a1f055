"""Action selection: scripted oracle, heuristic player, learned agents.

Every agent must emit the terminal action as soon as the hypothesis set has
shrunk to one pose, before any other computation. Stalls and B8's
NotActionable are raised as exceptions carrying diagnostic scores; the
episode driver converts them to failure statuses.

Score vectors are 9-slot tuples aligned with the global direction order
(index 8 = terminal); slots an agent did not score hold None.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AgentStalled, BeliefCollapse, EmptyFrontier, NotActionable
from .features import extract_template
from .grid import (
    DIRECTION_VECTORS,
    TERMINAL_ACTION,
    Cell,
    EpisodeState,
    OpenOutcome,
    Status,
    direction_class,
    in_bounds,
    neighbors8,
    true_count,
)
from .hypothesis import HypothesisSet, filter_incremental

Scores = tuple[float | None, ...]


@dataclass(frozen=True)
class Decision:
    """One selected action.

    `action` is a direction class 0-7, TERMINAL_ACTION, or None for a
    relocation move (a cell not 8-adjacent to the agent, BE only).
    `target` is None exactly for the terminal action.
    """

    action: int | None
    target: Cell | None
    scores: Scores | None = None

    def __post_init__(self):
        if (self.action == TERMINAL_ACTION) != (self.target is None):
            raise ValueError("terminal action and only it has no target cell")


def terminal_decision(scores: Scores | None = None) -> Decision:
    return Decision(action=TERMINAL_ACTION, target=None, scores=scores)


def check_terminal(h: HypothesisSet) -> bool:
    """True iff the belief has collapsed to a single pose."""
    if len(h) == 0:
        raise BeliefCollapse("terminal check on an empty hypothesis set")
    return len(h) == 1


def _legal_neighbor_slots(state: EpisodeState) -> list[tuple[int, Cell]]:
    """(direction index, cell) for in-bounds unopened neighbors of the agent."""
    r, c = state.agent_cell
    out = []
    for i, (dr, dc) in enumerate(DIRECTION_VECTORS):
        cell = (r + dr, c + dc)
        if in_bounds(cell, state.rows, state.cols) and cell not in state.opened:
            out.append((i, cell))
    return out


def oracle_expert_action(state: EpisodeState, h: HypothesisSet) -> Decision:
    """Ground-truth-safe one-step lookahead minimizing the next belief size.

    For each safe unopened neighbor the oracle simulates the observation the
    world would return and counts the surviving hypotheses; the smallest
    survivor count wins, ties broken by the fixed direction order.
    """
    assert state.status is Status.RUNNING
    scores: list[float | None] = [None] * 9
    best: tuple[int, int, Cell] | None = None
    for i, cell in _legal_neighbor_slots(state):
        if cell in state.mines:
            continue
        outcome = OpenOutcome.of_count(true_count(cell, state))
        survivors = filter_incremental(h, cell, outcome)
        scores[i] = float(len(survivors))
        if best is None or len(survivors) < best[0]:
            best = (len(survivors), i, cell)
    if best is None:
        raise AgentStalled("oracle has no safe unopened neighbor", scores=tuple(scores))
    return Decision(action=best[1], target=best[2], scores=tuple(scores))


def heuristic_action(state: EpisodeState, feature_map: np.ndarray) -> Decision:
    """Greedy ascent on the feature map over the agent's unopened neighbors.

    No safety information: the heuristic player can and does open mines.
    """
    scores: list[float | None] = [None] * 9
    best: tuple[float, int, Cell] | None = None
    for i, cell in _legal_neighbor_slots(state):
        s = float(feature_map[cell])
        scores[i] = s
        if best is None or s > best[0]:
            best = (s, i, cell)
    if best is None:
        raise AgentStalled("no unopened neighbor to move to", scores=tuple(scores))
    return Decision(action=best[1], target=best[2], scores=tuple(scores))


def mc_action(
    model,
    state: EpisodeState,
    feature_map: np.ndarray,
    mask_illegal: bool = True,
) -> Decision:
    """Multiclass direction classifier on the agent-centered template.

    Classes whose target cell is opened or off the board are masked (flag
    disables this for the illegal-move ablation), as are classes the model
    never saw in training.
    """
    if model.kind != "multiclass8":
        raise ValueError(f"mc agent needs a multiclass8 model, got {model.kind!r}")
    feats = extract_template(feature_map, state.agent_cell)
    raw = model.weights @ feats + model.biases
    legal = {i: cell for i, cell in _legal_neighbor_slots(state)}
    scores: list[float | None] = [None] * 9
    best: tuple[float, int, Cell] | None = None
    for i in range(8):
        if i in model.never_predictable:
            continue
        r, c = state.agent_cell
        cell = (r + DIRECTION_VECTORS[i][0], c + DIRECTION_VECTORS[i][1])
        if mask_illegal:
            if i not in legal:
                continue
            cell = legal[i]
        elif not in_bounds(cell, state.rows, state.cols):
            continue
        s = float(raw[i])
        scores[i] = s
        if best is None or s > best[0]:
            best = (s, i, cell)
    if best is None:
        raise AgentStalled("every direction class is masked", scores=tuple(scores))
    return Decision(action=best[1], target=best[2], scores=tuple(scores))


def _binary_score(model, feature_map: np.ndarray, cell: Cell) -> float:
    return float(model.weights[0] @ extract_template(feature_map, cell) + model.biases[0])


def b8_action(model, state: EpisodeState, feature_map: np.ndarray) -> Decision:
    """Binary actionability classifier applied to the 8-connected neighbors.

    Each legal neighbor is scored on its own centered template; the highest
    positive score wins. All scores non-positive is a first-class failure.
    """
    if model.kind != "binary":
        raise ValueError(f"b8 agent needs a binary model, got {model.kind!r}")
    scores: list[float | None] = [None] * 9
    best: tuple[float, int, Cell] | None = None
    for i, cell in _legal_neighbor_slots(state):
        s = _binary_score(model, feature_map, cell)
        scores[i] = s
        if s > 0.0 and (best is None or s > best[0]):
            best = (s, i, cell)
    if best is None:
        raise NotActionable("no neighbor classified actionable", scores=tuple(scores))
    return Decision(action=best[1], target=best[2], scores=tuple(scores))


def frontier_cells(state: EpisodeState) -> list[Cell]:
    """Unopened in-bounds cells with at least one opened 8-neighbor, row-major."""
    out = []
    for r in range(state.rows):
        for c in range(state.cols):
            cell = (r, c)
            if cell in state.opened:
                continue
            if any(n in state.opened for n in neighbors8(cell, state.rows, state.cols)):
                out.append(cell)
    return out


def be_action(model, state: EpisodeState, feature_map: np.ndarray) -> Decision:
    """Binary actionability classifier over the whole frontier.

    Picks the highest positively-classified frontier template; when nothing
    scores positive it still acts on the global argmax, so BE never stalls
    while a frontier exists. The chosen cell may be anywhere on the board;
    the agent relocates onto it.
    """
    if model.kind != "binary":
        raise ValueError(f"be agent needs a binary model, got {model.kind!r}")
    frontier = frontier_cells(state)
    if not frontier:
        raise EmptyFrontier("no frontier cell left to open")
    scored = [(cell, _binary_score(model, feature_map, cell)) for cell in frontier]
    best_cell, best_s = scored[0]
    for cell, s in scored[1:]:
        if s > best_s:
            best_cell, best_s = cell, s
    positive = [(cell, s) for cell, s in scored if s > 0.0]
    if positive:
        best_cell, best_s = positive[0]
        for cell, s in positive[1:]:
            if s > best_s:
                best_cell, best_s = cell, s
    return Decision(
        action=direction_class(state.agent_cell, best_cell),
        target=best_cell,
        scores=None,
    )
