"""Record an expert corpus and train the three learned agents from it.

The oracle plays seeded episodes; every move is stored with the 3x3 feature
template it saw. MC learns move directions one-vs-all from chosen templates;
B8 and BE learn a binary actionability score, with negatives drawn from the
templates the expert did not choose.
"""

from pathlib import Path

import hypsweep as hs

out = Path("demo_artifacts")
out.mkdir(exist_ok=True)

demos, stats = hs.record_demo_corpus(10, 10, hs.H3, 200, master_seed=11)
print(f"recorded {stats['kept']} demonstrations "
      f"({stats['discarded']} discarded, {stats['steps']} steps)")
hs.write_demos(out / "oracle_demos.jsonl", demos)

# multiclass direction policy
mc_data = hs.build_mc_dataset(demos)
mc_model, mc_report = hs.train_linear(mc_data, hs.Hyperparams())
print(f"mc: {mc_data.X.shape[0]} rows, "
      f"training accuracy {mc_report.accuracy:.3f}, "
      f"final objective {mc_report.objectives[-1]:.4f}")
if mc_model.never_predictable:
    print(f"    directions never seen in training: "
          f"{sorted(mc_model.never_predictable)}")
hs.save_model(mc_model, out / "mc.json")

# binary neighbor scorer (negatives: the other legal neighbor templates)
b8_data = hs.build_binary_dataset(demos, mode="b8")
b8_model, b8_report = hs.train_linear(b8_data, hs.Hyperparams())
pos = int((b8_data.y == 1).sum())
print(f"b8: {b8_data.X.shape[0]} rows ({pos} positive), "
      f"training accuracy {b8_report.accuracy:.3f}")
hs.save_model(b8_model, out / "b8.json")

# binary frontier scorer (negatives: sampled unchosen frontier templates)
be_data = hs.build_binary_dataset(demos, mode="be", seed=0)
be_model, be_report = hs.train_linear(be_data, hs.Hyperparams())
print(f"be: {be_data.X.shape[0]} rows, "
      f"training accuracy {be_report.accuracy:.3f}")
hs.save_model(be_model, out / "be.json")

# the objective sequence is non-increasing by construction; show the shape
objs = mc_report.objectives
print("mc objective head:", [round(v, 4) for v in objs[:5]])
print("mc objective tail:", [round(v, 4) for v in objs[-3:]])

# quick sanity run for each learned agent on a fresh board
for kind, model in [("mc", mc_model), ("b8", b8_model), ("be", be_model)]:
    result = hs.run_episode(hs.AgentSpec(kind=kind, model=model),
                            10, 10, hs.H3, hs.Pose(4, 4), seed=5)
    reason = f" ({result.failure_reason})" if result.failure_reason else ""
    print(f"{kind} on a fresh board: {result.status.value}"
          f" in {result.steps} steps{reason}")

print(f"models written to {out}/")
