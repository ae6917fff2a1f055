"""HTTP/JSON facade over the game engine for interactive play and inspection.

Sessions are in-memory: each holds the episode state, the current hypothesis
set, and the feature map, which is regenerated atomically with every state
change. Human-demo sessions buffer demonstration steps as the human plays and
persist them on finalize (successes to the demonstration store, failures to a
separate log). Agent-watch sessions step a named agent one decision at a
time, surfacing its per-class scores.

Views are pure functions of the observation stream: ground truth never
appears in a response unless the service was created with debug=True.
Requests to one session are serialized with a per-session lock; different
sessions proceed in parallel.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .agents import Decision, check_terminal
from .errors import (
    AgentStalled,
    AlreadyOpened,
    EpisodeOver,
    NotActionable,
    OutOfBounds,
)
from .features import extract_template, idt_feature_map
from .grid import (
    TERMINAL_ACTION,
    EpisodeState,
    Pose,
    ShapeTemplate,
    Status,
    direction_class,
    enumerate_poses,
    init_episode,
    open_cell,
    rotated_offsets,
)
from .harness import AgentSpec, _decide, resolve_template
from .hypothesis import HypothesisSet, build_hypothesis_set, filter_incremental, occupancy_map
from .learning import (
    ConfigFingerprint,
    Demonstration,
    DemoStep,
    LinearModel,
    append_demo,
    load_model,
)

MODEL_KINDS_WITHOUT_FILES = frozenset({"oracle", "hp"})


@dataclass
class Settings:
    models_dir: str = "models"
    demo_store: str = "demos/human_demos.jsonl"
    failure_store: str = "demos/human_failures.jsonl"
    debug: bool = False


class PoseBody(BaseModel):
    r: int
    c: int
    orient: int = 0


class CreateSessionRequest(BaseModel):
    mode: str = Field(default="human-demo", pattern="^(human-demo|agent-watch)$")
    rows: int = 10
    cols: int = 10
    template: str = "H3"
    orientations: list[int] = [0]
    feature: str = "accumulate"
    seed: int | None = None
    pose: PoseBody | None = None


class OpenRequest(BaseModel):
    row: int
    col: int


class AgentStepRequest(BaseModel):
    agent: str
    model: str | None = None


@dataclass
class SessionData:
    id: str
    mode: str
    template: ShapeTemplate
    orientations: tuple[int, ...]
    feature_variant: str
    state: EpisodeState
    h: HypothesisSet
    feature: np.ndarray
    demo_steps: list[DemoStep] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)
    finalized: bool = False

    def fingerprint(self) -> ConfigFingerprint:
        return ConfigFingerprint(
            self.state.rows, self.state.cols, self.template.name,
            self.orientations, self.feature_variant,
        )

    def refresh_feature(self) -> None:
        self.feature = idt_feature_map(occupancy_map(self.h), variant=self.feature_variant)
        self.updated = time.time()


def state_view(session: SessionData, debug: bool = False) -> dict:
    state = session.state
    view = {
        "status": state.status.value,
        "rows": state.rows,
        "cols": state.cols,
        "opened": [
            {"r": r, "c": c, "count": outcome.count}
            for (r, c), outcome in sorted(state.opened.items())
        ],
        "agent": list(state.agent_cell),
        "hyp_count": len(session.h),
        "hypotheses": session.h.to_payload(),
        "feature": [float(v) for v in session.feature.ravel()],
        "steps": state.steps,
    }
    if debug:
        gt = state.ground_truth
        view["ground_truth"] = {"r": gt.row, "c": gt.col, "orient": gt.orient}
    return view


def template_payload(session: SessionData) -> dict:
    """Static shape geometry for client-side overlays: per-orientation cell
    offsets, so a renderer can draw hypothesis footprints without any
    rotation logic of its own."""
    return {
        "name": session.template.name,
        "orientations": list(session.orientations),
        "offsets": {
            str(o): sorted([r, c] for r, c in rotated_offsets(session.template, o))
            for o in session.orientations
        },
    }


def _decision_payload(decision: Decision) -> dict:
    return {
        "action": decision.action,
        "target": None if decision.target is None else list(decision.target),
        "scores": None if decision.scores is None else [
            None if s is None else float(s) for s in decision.scores
        ],
    }


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings()
    app = FastAPI(title="hypsweep session service")
    sessions: dict[str, SessionData] = {}
    registry_lock = threading.Lock()
    model_cache: dict[str, LinearModel] = {}

    def get_session(session_id: str) -> SessionData:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def resolve_model(name: str) -> LinearModel:
        path = Path(name)
        if not path.suffix:
            path = path.with_suffix(".json")
        if not path.is_absolute():
            path = Path(settings.models_dir) / path
        key = str(path)
        if key not in model_cache:
            if not path.exists():
                raise HTTPException(status_code=404, detail=f"unknown model {name!r}")
            try:
                model_cache[key] = load_model(path)
            except (ValueError, KeyError) as exc:
                raise HTTPException(status_code=422, detail=f"bad model file: {exc}")
        return model_cache[key]

    @app.get("/health")
    def health():
        with registry_lock:
            n = len(sessions)
        return {"status": "ok", "sessions": n}

    @app.get("/models")
    def models():
        out = []
        root = Path(settings.models_dir)
        if root.is_dir():
            for path in sorted(root.glob("*.json")):
                try:
                    model = load_model(path)
                except (ValueError, KeyError):
                    continue
                out.append({
                    "name": path.stem,
                    "kind": model.kind,
                    "classes": model.classes,
                    "fingerprint": model.fingerprint.to_payload(),
                })
        return {"models": out}

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            template = resolve_template(req.template)
        except (FileNotFoundError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=f"bad template: {exc}")
        orientations = tuple(int(o) for o in req.orientations)
        try:
            universe = enumerate_poses(req.rows, req.cols, template, orientations=orientations)
        except Exception as exc:
            raise HTTPException(status_code=422, detail=f"bad config: {exc}")
        if not universe:
            raise HTTPException(status_code=422,
                                detail="no valid pose fits this configuration")
        rng = np.random.default_rng(req.seed)
        if req.pose is not None:
            pose = Pose(req.pose.r, req.pose.c, req.pose.orient)
            if pose not in universe:
                raise HTTPException(status_code=422, detail=f"pose {tuple(pose)} not valid here")
        else:
            pose = universe[int(rng.integers(len(universe)))]
        init_seed = int(rng.integers(0, 2 ** 63))
        try:
            state = init_episode(req.rows, req.cols, template, pose, init_seed)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        h = build_hypothesis_set(state.opened, template, req.rows, req.cols,
                                 orientations=orientations)
        session = SessionData(
            id=uuid.uuid4().hex,
            mode=req.mode,
            template=template,
            orientations=orientations,
            feature_variant=req.feature,
            state=state,
            h=h,
            feature=idt_feature_map(occupancy_map(h), variant=req.feature),
        )
        with registry_lock:
            sessions[session.id] = session
        return {
            "id": session.id,
            "view": state_view(session, debug=settings.debug),
            "template": template_payload(session),
        }

    @app.get("/sessions/{session_id}")
    def get_view(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return state_view(session, debug=settings.debug)

    @app.get("/sessions/{session_id}/template")
    def get_template(session_id: str):
        # static for the session's lifetime; lets a reloaded client rebuild
        # its overlays without carrying state of its own
        return template_payload(get_session(session_id))

    @app.post("/sessions/{session_id}/open")
    def open_move(session_id: str, req: OpenRequest):
        session = get_session(session_id)
        with session.lock:
            if session.mode != "human-demo":
                raise HTTPException(status_code=409, detail="open is for human-demo sessions")
            state = session.state
            pre_cell = state.agent_cell
            template_row = tuple(float(v) for v in extract_template(session.feature, pre_cell))
            cell = (req.row, req.col)
            try:
                outcome = open_cell(state, cell)
            except EpisodeOver as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except AlreadyOpened as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except OutOfBounds as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            if outcome.is_mine:
                session.updated = time.time()
                return {
                    "outcome": "mine",
                    "view": state_view(session, debug=settings.debug),
                }
            session.h = filter_incremental(session.h, cell, outcome)
            session.refresh_feature()
            session.demo_steps.append(DemoStep(
                template=template_row,
                action=direction_class(pre_cell, cell),
                agent_cell=pre_cell,
                chosen_cell=cell,
            ))
            if check_terminal(session.h):
                state.status = Status.SUCCESS
            return {
                "outcome": outcome.count,
                "view": state_view(session, debug=settings.debug),
            }

    @app.post("/sessions/{session_id}/agent-step")
    def agent_step(session_id: str, req: AgentStepRequest):
        session = get_session(session_id)
        with session.lock:
            if session.mode != "agent-watch":
                raise HTTPException(status_code=409,
                                    detail="agent-step is for agent-watch sessions")
            state = session.state
            if state.status is not Status.RUNNING:
                raise HTTPException(status_code=409,
                                    detail=f"episode already {state.status.value}")
            model = None
            if req.agent not in MODEL_KINDS_WITHOUT_FILES:
                if req.model is None:
                    raise HTTPException(status_code=422,
                                        detail=f"agent {req.agent!r} needs a model")
                model = resolve_model(req.model)
            try:
                spec = AgentSpec(kind=req.agent, model=model)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            if check_terminal(session.h):
                state.status = Status.SUCCESS
                session.updated = time.time()
                return {
                    "decision": {"action": TERMINAL_ACTION, "target": None, "scores": None},
                    "view": state_view(session, debug=settings.debug),
                }
            try:
                decision = _decide(spec, state, session.h, session.feature)
            except NotActionable as exc:
                state.status = Status.FAILED_STALLED
                session.updated = time.time()
                return {
                    "decision": None,
                    "failure": {
                        "reason": "not_actionable",
                        "scores": [None if s is None else float(s) for s in exc.scores],
                    },
                    "view": state_view(session, debug=settings.debug),
                }
            except AgentStalled as exc:
                state.status = Status.FAILED_STALLED
                session.updated = time.time()
                scores = None
                if exc.scores is not None:
                    scores = [None if s is None else float(s) for s in exc.scores]
                return {
                    "decision": None,
                    "failure": {"reason": "stalled", "scores": scores},
                    "view": state_view(session, debug=settings.debug),
                }
            outcome = open_cell(state, decision.target)
            if outcome.is_mine:
                session.updated = time.time()
                return {
                    "decision": _decision_payload(decision),
                    "failure": {"reason": "mine", "scores": None},
                    "view": state_view(session, debug=settings.debug),
                }
            session.h = filter_incremental(session.h, decision.target, outcome)
            session.refresh_feature()
            return {
                "decision": _decision_payload(decision),
                "outcome": outcome.count,
                "view": state_view(session, debug=settings.debug),
            }

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if session.mode != "human-demo":
                raise HTTPException(status_code=409,
                                    detail="finalize is for human-demo sessions")
            state = session.state
            if state.status is Status.RUNNING:
                raise HTTPException(status_code=409, detail="session still running")
            if session.finalized:
                raise HTTPException(status_code=409, detail="session already finalized")
            session.finalized = True
            if state.status is Status.SUCCESS:
                demo = Demonstration(
                    episode_id=session.id[:12],
                    steps=tuple(session.demo_steps),
                    source="human",
                    fingerprint=session.fingerprint(),
                    ground_truth=state.ground_truth,
                    initial_cell=_initial_cell(session),
                    template_offsets=session.template.offsets,
                    template_name=session.template.name,
                )
                path = Path(settings.demo_store)
                path.parent.mkdir(parents=True, exist_ok=True)
                append_demo(path, demo)
                return {"stored": len(demo.steps), "path": str(path), "failed": False}
            path = Path(settings.failure_store)
            path.parent.mkdir(parents=True, exist_ok=True)
            record = {
                "episode_id": session.id[:12],
                "status": state.status.value,
                "steps": state.steps,
                "source": "human",
            }
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
            return {"stored": 0, "path": str(path), "failed": True}

    return app


def _initial_cell(session: SessionData):
    """The free-reveal cell: the first move's position, or the agent cell if
    no move has been made yet."""
    if session.demo_steps:
        return session.demo_steps[0].agent_cell
    return session.state.agent_cell


def main_serve(host: str = "127.0.0.1", port: int = 8000,
               settings: Settings | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(settings), host=host, port=port)
