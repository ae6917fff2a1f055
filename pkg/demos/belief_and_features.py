"""Hypothesis sets, occupancy maps, and the IDT feature, step by step.

The agent never sees the mines. What it can compute is the set of shape
placements consistent with its observations, the per-cell occupancy
probability under that set, and a normalized inverse-distance transform of
the occupancy mass that the learned agents consume as their feature map.
"""

import numpy as np

import hypsweep as hs
from hypsweep import H3, Pose

np.set_printoptions(precision=2, suppress=True, linewidth=120)

rows = cols = 8
pose = Pose(2, 4)

# before any observation the universe is every placement that fits
universe = hs.enumerate_poses(rows, cols, H3)
print(f"{len(universe)} possible placements on an {rows}x{cols} board")

# the free initial reveal already filters: the revealed cell is mine-free
# and its neighborhood count must match
state = hs.start_episode_at(rows, cols, H3, pose, (5, 2))
h = hs.build_hypothesis_set(state.opened, H3, rows, cols)
print(f"after the free reveal at (5,2): {len(h)} hypotheses")

# occupancy: fraction of surviving hypotheses covering each cell;
# total mass is always exactly the shape size (7 cells for H3)
occ = hs.occupancy_map(h)
print(f"occupancy mass {occ.sum():.6f} == shape size {len(H3.offsets)}")
print(occ)

# the IDT feature spreads that mass by Chebyshev distance and rescales so
# the hottest cell is exactly 1; 'nearest' is the sparser alternative
fm = hs.idt_feature_map(occ)
print("IDT feature (accumulate), max", fm.max())
print(fm)
print("IDT feature (nearest)")
print(hs.idt_feature_map(occ, variant="nearest"))

# open two more cells and watch the set shrink
for cell in [(4, 3), (3, 3)]:
    outcome = hs.open_cell(state, cell)
    h = hs.filter_incremental(h, cell, outcome)
    print(f"open {cell}: count {outcome.count}, |H| = {len(h)}")

# incremental filtering always agrees with rebuilding from scratch
rebuilt = hs.build_hypothesis_set(state.opened, H3, rows, cols)
print("incremental == rebuilt:", set(h.poses) == set(rebuilt.poses))

# the 3x3 template centered on the agent is what the classifiers see
template = hs.extract_template(hs.idt_feature_map(hs.occupancy_map(h)),
                               state.agent_cell)
print("agent-centered template:", np.round(template, 3))
