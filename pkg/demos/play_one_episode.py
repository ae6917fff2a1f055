"""Run one episode end to end and watch the belief collapse.

The board hides an H-shaped cluster of mines. Opening a safe cell reveals
how many mine cells sit in its 8-neighborhood, and the hypothesis set keeps
exactly the placements consistent with everything seen so far. The oracle
expert picks, among provably safe neighbor moves, the one whose worst-case
surviving hypothesis count is smallest.
"""

import numpy as np

import hypsweep as hs
from hypsweep import H3, Pose

# a fixed hidden pose so the run is reproducible
pose = Pose(4, 2)
result = hs.run_episode(hs.AgentSpec(kind="oracle"), 10, 10, H3, pose, seed=31)

print(f"hidden pose: {tuple(pose)}")
print(f"free reveal at: {result.initial_cell}")
print(f"status: {result.status.value} in {result.steps} steps")
print()

DIRS = "N NE E SE S SW W NW".split() + ["a_ter"]
for rec in result.transcript:
    if rec.action == hs.TERMINAL_ACTION:
        print(f"step {rec.step}: {DIRS[rec.action]} (belief is a singleton, stop)")
    else:
        print(f"step {rec.step}: from {rec.agent_cell} move {DIRS[rec.action]} "
              f"-> open {rec.target}, count {rec.outcome}, "
              f"{rec.hyp_count} hypotheses left")
print()

# the same loop, driven by hand, to show the moving parts
state = hs.start_episode_at(10, 10, H3, pose, result.initial_cell)
h = hs.build_hypothesis_set(state.opened, H3, 10, 10)
print(f"manual replay: start with {len(h)} hypotheses")
while not hs.check_terminal(h):
    decision = hs.oracle_expert_action(state, h)
    outcome = hs.open_cell(state, decision.target)
    h = hs.filter_incremental(h, decision.target, outcome)
    print(f"  open {decision.target}: count {outcome.count}, |H| = {len(h)}")

# the lone survivor is the hidden pose
(survivor,) = h.poses
print(f"survivor {tuple(survivor)} == truth {tuple(pose)}:",
      survivor == pose)

# a board sketch: * mine, numbers are revealed counts, . unopened
board = np.full((10, 10), ".", dtype=object)
for r, c in hs.shape_cells(H3, pose):
    board[r, c] = "*"
for (r, c), outcome in state.opened.items():
    board[r, c] = str(outcome.count)
print()
for row in board:
    print(" ".join(row))
