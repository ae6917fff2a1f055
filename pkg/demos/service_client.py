"""Drive the session service over its HTTP surface.

The service hosts interactive episodes: human-demo sessions collect played
demonstrations, agent-watch sessions step an agent one decision at a time.
This script talks to an in-process test client; `hypsweep serve` runs the
same app on a real port.
"""

from pathlib import Path

from fastapi.testclient import TestClient

import hypsweep as hs
from hypsweep.service import Settings, create_app

art = Path("demo_artifacts")
art.mkdir(exist_ok=True)

# train a small mc model for the agent-watch part
demos, _ = hs.record_demo_corpus(10, 10, hs.H3, 120, master_seed=11)
model, _ = hs.train_linear(hs.build_mc_dataset(demos), hs.Hyperparams())
hs.save_model(model, art / "mc.json")

settings = Settings(models_dir=str(art),
                    demo_store=str(art / "human_demos.jsonl"),
                    failure_store=str(art / "human_failures.jsonl"))
client = TestClient(create_app(settings))

print("health:", client.get("/health").json())
print("models:", [m["name"] for m in client.get("/models").json()["models"]])

# an agent-watch session: create, then step the mc agent until it stops
body = client.post("/sessions", json={"mode": "agent-watch", "seed": 6}).json()
sid = body["id"]
print(f"\nagent-watch session {sid[:8]}..., "
      f"{body['view']['hyp_count']} hypotheses after the free reveal")
for _ in range(50):
    step = client.post(f"/sessions/{sid}/agent-step",
                       json={"agent": "mc", "model": "mc"}).json()
    view = step["view"]
    if step.get("failure"):
        print(f"  agent failed: {step['failure']['reason']}")
        break
    d = step["decision"]
    if d["action"] == hs.TERMINAL_ACTION:
        print(f"  a_ter: belief collapsed, status {view['status']}")
        break
    print(f"  action {d['action']} -> {d['target']}, count {step['outcome']}, "
          f"|H| = {view['hyp_count']}")

# a human-demo session: open cells by hand; a successful episode lands in
# the demonstration store on finalize
body = client.post("/sessions", json={"seed": 40}).json()
sid, view = body["id"], body["view"]
print(f"\nhuman-demo session {sid[:8]}..., free reveal {view['opened'][0]}")
while view["status"] == "running":
    # a cautious human: open the coldest closed cell, far from the
    # suspected mass (hot cells are exactly where the mines tend to be)
    feature = view["feature"]
    opened = {(o["r"], o["c"]) for o in view["opened"]}
    ranked = sorted(range(100), key=lambda i: feature[i])
    row, col = next((i // 10, i % 10) for i in ranked
                    if (i // 10, i % 10) not in opened)
    resp = client.post(f"/sessions/{sid}/open",
                       json={"row": row, "col": col}).json()
    view = resp["view"]
    print(f"  open ({row},{col}): {resp['outcome']}, status {view['status']}, "
          f"|H| = {view['hyp_count']}")

final = client.post(f"/sessions/{sid}/finalize").json()
where = "demo store" if not final["failed"] else "failure log"
print(f"finalized: {final['stored']} steps stored in the {where} "
      f"({final['path']})")
