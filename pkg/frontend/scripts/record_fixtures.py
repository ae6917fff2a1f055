#!/usr/bin/env python3
"""Record request/response scripts from a live session service.

The UI tests replay these against a scripted mock fetch, so every payload a
test asserts on is a genuine service payload, floats and all. Rerun after
any service contract change:

    python3 scripts/record_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

import hypsweep as hs
from hypsweep import H3, Pose
from hypsweep.learning import save_model
from hypsweep.service import Settings, create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CORPUS_SEED = 11
CORPUS_EPISODES = 520


class Recorder:
    """Issue requests and keep (method, path, body, status, response) tuples."""

    def __init__(self, client: TestClient):
        self.client = client
        self.steps = []

    def call(self, method: str, path: str, body=None):
        kwargs = {"json": body} if body is not None else {}
        resp = getattr(self.client, method.lower())(path, **kwargs)
        step = {
            "method": method,
            "path": path,
            "status": resp.status_code,
            "response": resp.json(),
        }
        if body is not None:
            step["body"] = body
        self.steps.append(step)
        return step["response"], resp.status_code

    def dump(self, name: str):
        FIXTURES.mkdir(parents=True, exist_ok=True)
        path = FIXTURES / name
        path.write_text(json.dumps({"steps": self.steps}, indent=1, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path.relative_to(Path.cwd())} ({len(self.steps)} steps)")
        self.steps = []


def safe_cells_rowmajor(view, pose):
    mines = set(hs.shape_cells(H3, pose))
    opened = {(o["r"], o["c"]) for o in view["opened"]}
    for r in range(view["rows"]):
        for c in range(view["cols"]):
            if (r, c) not in mines and (r, c) not in opened:
                yield (r, c)


def record_play_success(rec: Recorder):
    pose = Pose(2, 3)
    body = {"mode": "human-demo", "seed": 21, "pose": {"r": 2, "c": 3}}
    created, _ = rec.call("POST", "/sessions", body)
    sid, view = created["id"], created["view"]
    for r, c in safe_cells_rowmajor(view, pose):
        resp, _ = rec.call("POST", f"/sessions/{sid}/open", {"row": r, "col": c})
        view = resp["view"]
        if view["status"] == "success":
            break
    assert view["status"] == "success"
    rec.call("POST", f"/sessions/{sid}/finalize")
    _, code = rec.call("POST", f"/sessions/{sid}/finalize")
    assert code == 409
    rec.dump("play_success.json")


def record_play_mine(rec: Recorder):
    pose = Pose(4, 4)
    body = {"mode": "human-demo", "seed": 9, "pose": {"r": 4, "c": 4}}
    created, _ = rec.call("POST", "/sessions", body)
    sid = created["id"]
    mine = min(hs.shape_cells(H3, pose))
    resp, _ = rec.call("POST", f"/sessions/{sid}/open", {"row": mine[0], "col": mine[1]})
    assert resp["outcome"] == "mine"
    rec.call("POST", f"/sessions/{sid}/finalize")
    # the restart the UI offers: same config, fresh session
    rec.call("POST", "/sessions", body)
    rec.dump("play_mine.json")


def record_play_refresh(rec: Recorder):
    pose = Pose(4, 2)
    body = {"mode": "human-demo", "seed": 31, "pose": {"r": 4, "c": 2}}
    created, _ = rec.call("POST", "/sessions", body)
    sid, view = created["id"], created["view"]
    for (r, c), _ in zip(safe_cells_rowmajor(view, pose), range(3)):
        resp, _ = rec.call("POST", f"/sessions/{sid}/open", {"row": r, "col": c})
        view = resp["view"]
    rec.call("GET", f"/sessions/{sid}")
    rec.call("GET", f"/sessions/{sid}/template")
    rec.dump("play_refresh.json")


def record_watch_mc(rec: Recorder):
    body = {"mode": "agent-watch", "seed": 14, "pose": {"r": 5, "c": 2}}
    created, _ = rec.call("POST", "/sessions", body)
    resp, _ = rec.call("POST", f"/sessions/{created['id']}/agent-step",
                       {"agent": "mc", "model": "mc"})
    assert resp["decision"] is not None and resp["decision"]["scores"]
    rec.dump("watch_mc.json")


def record_watch_oracle(rec: Recorder):
    body = {"mode": "agent-watch", "seed": 6}
    created, _ = rec.call("POST", "/sessions", body)
    sid = created["id"]
    for _ in range(100):
        resp, _ = rec.call("POST", f"/sessions/{sid}/agent-step", {"agent": "oracle"})
        if resp["decision"]["action"] == hs.TERMINAL_ACTION:
            break
    assert resp["view"]["status"] == "success"
    rec.dump("watch_oracle.json")


def record_watch_b8(rec: Recorder, client: TestClient):
    for seed in range(40):
        probe = client.post("/sessions", json={"mode": "agent-watch", "seed": seed}).json()
        resp = client.post(f"/sessions/{probe['id']}/agent-step",
                           json={"agent": "b8", "model": "b8"}).json()
        failure = resp.get("failure")
        if failure and failure["reason"] == "not_actionable":
            body = {"mode": "agent-watch", "seed": seed}
            created, _ = rec.call("POST", "/sessions", body)
            rec.call("POST", f"/sessions/{created['id']}/agent-step",
                     {"agent": "b8", "model": "b8"})
            rec.dump("watch_b8.json")
            return
    raise SystemExit("no not_actionable seed found in 0..39")


def record_watch_error(rec: Recorder):
    body = {"mode": "agent-watch", "seed": 3}
    created, _ = rec.call("POST", "/sessions", body)
    _, code = rec.call("POST", f"/sessions/{created['id']}/agent-step",
                       {"agent": "mc", "model": "missing"})
    assert code == 404
    rec.dump("watch_error.json")


def main():
    demos, stats = hs.record_demo_corpus(10, 10, H3, CORPUS_EPISODES,
                                         master_seed=CORPUS_SEED)
    assert stats["kept"] >= 500
    mc_model, _ = hs.train_linear(hs.build_mc_dataset(demos), hs.Hyperparams())
    b8_model, _ = hs.train_linear(hs.build_binary_dataset(demos, mode="b8"),
                                  hs.Hyperparams())

    with tempfile.TemporaryDirectory() as tmp:
        models_dir = Path(tmp) / "models"
        models_dir.mkdir()
        save_model(mc_model, models_dir / "mc.json")
        save_model(b8_model, models_dir / "b8.json")
        settings = Settings(
            models_dir=str(models_dir),
            demo_store=str(Path(tmp) / "demos.jsonl"),
            failure_store=str(Path(tmp) / "failures.jsonl"),
            debug=False,
        )
        with TestClient(create_app(settings)) as client:
            rec = Recorder(client)
            record_play_success(rec)
            record_play_mine(rec)
            record_play_refresh(rec)
            record_watch_mc(rec)
            record_watch_oracle(rec)
            record_watch_b8(rec, client)
            record_watch_error(rec)


if __name__ == "__main__":
    main()
