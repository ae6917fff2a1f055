"""Action selection for every agent kind."""

import numpy as np
import pytest

import hypsweep as hs
from hypsweep import (
    AgentStalled,
    BeliefCollapse,
    Decision,
    EmptyFrontier,
    H3,
    NotActionable,
    OpenOutcome,
    Pose,
)


def _binary_model(weights, bias, fp=None):
    fp = fp or hs.ConfigFingerprint(5, 5, "H3", (0,), "accumulate")
    return hs.LinearModel(
        kind="binary",
        weights=np.asarray([weights], dtype=float),
        biases=np.asarray([bias], dtype=float),
        fingerprint=fp,
        hyperparams=hs.Hyperparams(),
    )


def _mc_model(weights, biases, never=(), fp=None):
    fp = fp or hs.ConfigFingerprint(5, 5, "H3", (0,), "accumulate")
    return hs.LinearModel(
        kind="multiclass8",
        weights=np.asarray(weights, dtype=float),
        biases=np.asarray(biases, dtype=float),
        fingerprint=fp,
        hyperparams=hs.Hyperparams(),
        never_predictable=tuple(never),
    )


def _frozen_state():
    """5x5 board, ground truth H3 at (0,0), agent at (3,1) with count 2."""
    state = hs.start_episode_at(5, 5, H3, Pose(0, 0), (3, 1))
    h = hs.build_hypothesis_set(state.opened, H3, 5, 5)
    return state, h


def test_decision_invariant():
    with pytest.raises(ValueError):
        Decision(action=hs.TERMINAL_ACTION, target=(1, 1))
    with pytest.raises(ValueError):
        Decision(action=0, target=None)
    Decision(action=None, target=(1, 1))  # relocation is fine


def test_check_terminal():
    h = hs.build_hypothesis_set({}, H3, 5, 5)
    assert not hs.check_terminal(h)
    single = hs.HypothesisSet(poses=(Pose(0, 0),), template=H3, rows=5, cols=5)
    assert hs.check_terminal(single)
    empty = hs.HypothesisSet(poses=(), template=H3, rows=5, cols=5)
    with pytest.raises(BeliefCollapse):
        hs.check_terminal(empty)


def test_oracle_frozen_decision():
    state, h = _frozen_state()
    assert [(p.row, p.col) for p in h.poses] == [(0, 0), (1, 2)]
    decision = hs.oracle_expert_action(state, h)
    # N, E, SE, S, W all collapse to one pose; SW leaves two; NE and NW are
    # mines and never simulated
    assert decision.action == 0
    assert decision.target == (2, 1)
    assert decision.scores == (1.0, None, 1.0, 1.0, 1.0, 2.0, 1.0, None, None)


def test_oracle_never_opens_mines(rng):
    # the oracle can stall in a degenerate corner but must never hit a mine
    for _ in range(20):
        universe = hs.enumerate_poses(8, 8, H3)
        gt = universe[int(rng.integers(len(universe)))]
        result = hs.run_episode(hs.AgentSpec(kind="oracle"), 8, 8, H3, gt,
                                seed=int(rng.integers(2 ** 32)))
        assert result.status is not hs.Status.FAILED_MINE
        mines = hs.shape_cells(H3, gt)
        for step in result.transcript:
            assert step.target not in mines or step.target is None


def test_oracle_stall_when_surrounded():
    # agent in a corner whose unopened neighbors are all mines
    state = hs.start_episode_at(5, 5, H3, Pose(0, 0), (1, 3))
    hs.open_cell(state, (0, 3))
    hs.open_cell(state, (2, 3))
    hs.open_cell(state, (2, 4))
    hs.open_cell(state, (1, 4))
    hs.open_cell(state, (0, 4))
    state.agent_cell = (1, 3)
    h = hs.build_hypothesis_set(state.opened, H3, 5, 5)
    # remaining neighbors (0,2),(1,2),(2,2) are all ground-truth mines
    with pytest.raises(AgentStalled):
        hs.oracle_expert_action(state, h)


def test_heuristic_greedy_and_tiebreak():
    state, _ = _frozen_state()
    fm = np.zeros((5, 5))
    fm[2, 1] = 0.9  # N
    fm[4, 1] = 0.9  # S, same score: N wins by direction order
    decision = hs.heuristic_action(state, fm)
    assert decision.action == 0 and decision.target == (2, 1)
    fm[4, 1] = 0.95
    decision = hs.heuristic_action(state, fm)
    assert decision.action == 4 and decision.target == (4, 1)


def test_heuristic_skips_opened_cells():
    state, _ = _frozen_state()
    fm = np.zeros((5, 5))
    fm[2, 1] = 1.0
    hs.open_cell(state, (2, 1))
    state.agent_cell = (3, 1)
    fm[3, 2] = 0.5
    decision = hs.heuristic_action(state, fm)
    assert decision.target == (3, 2)


def test_heuristic_stalls_without_neighbors():
    state = hs.start_episode_at(5, 5, H3, Pose(2, 2), (0, 0))
    hs.open_cell(state, (0, 1))
    hs.open_cell(state, (1, 1))
    hs.open_cell(state, (1, 0))
    state.agent_cell = (0, 0)
    with pytest.raises(AgentStalled):
        hs.heuristic_action(state, np.ones((5, 5)))


def test_mc_action_picks_argmax():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    weights = np.zeros((8, 9))
    biases = np.zeros(8)
    biases[2] = 5.0  # E
    model = _mc_model(weights, biases)
    decision = hs.mc_action(model, state, fm)
    assert decision.action == 2
    assert decision.target == (3, 2)
    assert decision.scores[2] == pytest.approx(5.0)


def test_mc_action_masks_illegal_targets():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    hs.open_cell(state, (3, 2))  # E now opened
    state.agent_cell = (3, 1)
    h = hs.build_hypothesis_set(state.opened, H3, 5, 5)
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    biases = np.zeros(8)
    biases[2] = 5.0
    biases[4] = 1.0  # S
    model = _mc_model(np.zeros((8, 9)), biases)
    decision = hs.mc_action(model, state, fm)
    assert decision.action == 4  # E masked, S is best remaining
    assert decision.scores[2] is None


def test_mc_action_masks_never_predictable():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    biases = np.zeros(8)
    biases[2] = 5.0
    biases[0] = 1.0
    model = _mc_model(np.zeros((8, 9)), biases, never=(2,))
    decision = hs.mc_action(model, state, fm)
    assert decision.action == 0


def test_mc_action_stalls_when_all_masked():
    state = hs.start_episode_at(5, 5, H3, Pose(2, 2), (0, 0))
    hs.open_cell(state, (0, 1))
    hs.open_cell(state, (1, 1))
    hs.open_cell(state, (1, 0))
    state.agent_cell = (0, 0)
    h = hs.build_hypothesis_set(state.opened, H3, 5, 5)
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    model = _mc_model(np.zeros((8, 9)), np.zeros(8))
    with pytest.raises(AgentStalled):
        hs.mc_action(model, state, fm)


def test_mc_argmax_invariant_to_positive_rescaling():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    rng = np.random.default_rng(5)
    w = rng.normal(size=(8, 9))
    b = rng.normal(size=8)
    base = hs.mc_action(_mc_model(w, b), state, fm)
    scaled = hs.mc_action(_mc_model(3.0 * w, 3.0 * b), state, fm)
    assert base.action == scaled.action and base.target == scaled.target


def test_mc_rejects_wrong_model_kind():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    with pytest.raises(ValueError):
        hs.mc_action(_binary_model(np.zeros(9), 0.0), state, fm)


def test_b8_positive_max_wins():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    # score = mean of the 3x3 window via uniform weights; E cell (3,2) has a
    # higher-valued window than S (4,1) on this map
    model = _binary_model(np.ones(9), -3.0)
    decision = hs.b8_action(model, state, fm)
    assert decision.action is not None
    scored = {i: s for i, s in enumerate(decision.scores[:8]) if s is not None}
    assert decision.scores[decision.action] == max(scored.values())
    assert decision.scores[decision.action] > 0.0


def test_b8_not_actionable_carries_scores():
    state, h = _frozen_state()
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    model = _binary_model(np.zeros(9), -1.0)
    with pytest.raises(NotActionable) as err:
        hs.b8_action(model, state, fm)
    scores = err.value.scores
    assert len(scores) == 9
    legal = [s for s in scores[:8] if s is not None]
    assert legal and all(s == -1.0 for s in legal)


def test_frontier_cells_row_major():
    state = hs.start_episode_at(5, 5, H3, Pose(0, 0), (4, 4))
    frontier = hs.frontier_cells(state)
    assert frontier == [(3, 3), (3, 4), (4, 3)]


def test_be_prefers_positive_then_global_argmax():
    state = hs.start_episode_at(5, 5, H3, Pose(0, 0), (4, 4))
    h = hs.build_hypothesis_set(state.opened, H3, 5, 5)
    fm = hs.idt_feature_map(hs.occupancy_map(h))
    # all-negative scorer still acts: global argmax over the frontier
    model = _binary_model(np.zeros(9), -1.0)
    decision = hs.be_action(model, state, fm)
    assert decision.target == (3, 3)  # first frontier cell on a tie
    # positive scorer picks the positively-classified max
    model = _binary_model(np.ones(9), 0.0)
    decision = hs.be_action(model, state, fm)
    assert decision.target in hs.frontier_cells(state)


def test_be_relocation_has_no_direction():
    state = hs.start_episode_at(6, 6, H3, Pose(0, 0), (5, 5))
    hs.open_cell(state, (4, 4))
    state.agent_cell = (5, 5)
    h = hs.build_hypothesis_set(state.opened, H3, 6, 6)
    fm = np.zeros((6, 6))
    fm[3, 3] = 1.0  # frontier cell two steps away from the agent
    model = _binary_model(np.array([0, 0, 0, 0, 1, 0, 0, 0, 0], dtype=float), 0.0)
    decision = hs.be_action(model, state, fm)
    assert decision.target == (3, 3)
    assert decision.action is None  # not 8-adjacent to (5,5)


def test_be_empty_frontier():
    state = hs.start_episode_at(5, 5, H3, Pose(0, 0), (4, 4))
    state.opened = {(r, c): hs.OpenOutcome.of_count(0)
                    for r in range(5) for c in range(5)}
    model = _binary_model(np.ones(9), 0.0)
    with pytest.raises(EmptyFrontier):
        hs.be_action(model, state, np.ones((5, 5)))


def test_terminal_decision_shape():
    d = hs.terminal_decision()
    assert d.action == hs.TERMINAL_ACTION and d.target is None
