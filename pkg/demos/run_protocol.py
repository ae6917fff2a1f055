"""The paired evaluation protocol: same boards, same reveals, every agent.

One master seed draws 10 hidden poses and a 10x10 grid of episode seeds.
Every agent plays exactly the same (pose, reveal) pairs, so per-cell numbers
are directly comparable. Cells read "mean;failures" with the failure part
dropped when an agent never failed on that pose; "*" marks the best mean.
"""

import hypsweep as hs

# a small corpus is enough for a readable table; bump for better agents
demos, _ = hs.record_demo_corpus(10, 10, hs.H3, 200, master_seed=11)
mc_model, _ = hs.train_linear(hs.build_mc_dataset(demos), hs.Hyperparams())
b8_model, _ = hs.train_linear(hs.build_binary_dataset(demos, mode="b8"),
                              hs.Hyperparams())

config = hs.ProtocolConfig(rows=10, cols=10, n_poses=10, n_inits=10,
                           master_seed=42)
report = hs.run_protocol(config, [
    hs.AgentSpec(kind="oracle"),
    hs.AgentSpec(kind="hp"),
    hs.AgentSpec(kind="mc", model=mc_model),
    hs.AgentSpec(kind="b8", model=b8_model),
])

print(report.render_text())

for name in report.agent_names:
    s = report.agent_summary(name)
    mean = "-" if s["mean_steps"] is None else f"{s['mean_steps']:.2f}"
    print(f"{name:7s} {s['successes']:3d}/{s['runs']} successes, "
          f"mean steps {mean}")

# failure modes tell the story: hp greedily walks into mines, b8 mostly
# refuses to act (no neighbor template classifies positive)
print()
for name in report.agent_names:
    reasons = {}
    for per_pose in report.results[name]:
        for r in per_pose:
            if not r.success:
                reasons[r.failure_reason] = reasons.get(r.failure_reason, 0) + 1
    if reasons:
        print(f"{name} failures: {reasons}")

# the CSV twin of the table, for spreadsheets
print()
print(report.render_csv()[:200] + "...")
