"""Episode runner, demonstration recording, and the paired evaluation protocol.

One episode: reveal a free initial cell, build the hypothesis set over the
chosen orientation universe, then alternate agent decisions with world opens
and belief filtering until the belief is a singleton (success), a mine or a
stall ends the run, or the step cap (rows*cols moves by default) trips.

The protocol runs every agent on the same (pose, init-seed) pairs so per-cell
numbers are paired comparisons: sample n_poses ground-truth poses without
replacement, then an n_poses x n_inits matrix of init seeds, all from one
master generator. Reported cells are mean steps over successful runs plus a
failure count, rendered "mean;failures".
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field

import numpy as np

from .agents import (
    Decision,
    b8_action,
    be_action,
    check_terminal,
    heuristic_action,
    mc_action,
    oracle_expert_action,
    terminal_decision,
)
from .errors import (
    AgentStalled,
    AlreadyOpened,
    DemoReplayError,
    NotActionable,
    OutOfBounds,
)
from .features import extract_template, idt_feature_map
from .grid import (
    BUILTIN_TEMPLATES,
    TERMINAL_ACTION,
    Cell,
    EpisodeState,
    Pose,
    ShapeTemplate,
    Status,
    enumerate_poses,
    init_episode,
    open_cell,
    start_episode_at,
)
from .hypothesis import HypothesisSet, build_hypothesis_set, filter_incremental, occupancy_map
from .learning import ConfigFingerprint, Demonstration, DemoStep, LinearModel

AGENT_KINDS = ("oracle", "hp", "mc", "b8", "be")
_FEATURE_AGENTS = frozenset({"hp", "mc", "b8", "be"})
_MODEL_AGENTS = frozenset({"mc", "b8", "be"})


def resolve_template(name_or_path: str) -> ShapeTemplate:
    """Look up a built-in template by name, else load a '#'/'.' text file."""
    if name_or_path in BUILTIN_TEMPLATES:
        return BUILTIN_TEMPLATES[name_or_path]
    return ShapeTemplate.load(name_or_path)


@dataclass(frozen=True)
class AgentSpec:
    """An agent to run: a kind plus, for learned kinds, its model."""

    kind: str
    model: LinearModel | None = None
    mask_illegal: bool = True  # mc only; False is the illegal-move ablation
    name: str = ""

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if self.kind in _MODEL_AGENTS and self.model is None:
            raise ValueError(f"agent kind {self.kind!r} needs a model")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @property
    def needs_features(self) -> bool:
        return self.kind in _FEATURE_AGENTS


def _decide(spec: AgentSpec, state: EpisodeState, h: HypothesisSet,
            feature_map: np.ndarray | None) -> Decision:
    if spec.kind == "oracle":
        return oracle_expert_action(state, h)
    if spec.kind == "hp":
        return heuristic_action(state, feature_map)
    if spec.kind == "mc":
        return mc_action(spec.model, state, feature_map, mask_illegal=spec.mask_illegal)
    if spec.kind == "b8":
        return b8_action(spec.model, state, feature_map)
    return be_action(spec.model, state, feature_map)


@dataclass(frozen=True)
class TranscriptStep:
    """One executed move. `agent_cell` is the position before the move."""

    step: int
    agent_cell: Cell
    action: int | None  # 0-7, TERMINAL_ACTION, or None for a relocation
    target: Cell | None
    outcome: str | int | None  # neighborhood count, "mine", or None (terminal)
    hyp_count: int  # after filtering on this move's observation
    template: tuple[float, ...] | None = None  # captured only when recording demos


@dataclass
class EpisodeResult:
    status: Status
    steps: int
    ground_truth: Pose
    initial_cell: Cell
    transcript: tuple[TranscriptStep, ...]
    failure_reason: str | None = None  # mine | stalled | not_actionable | step_cap | illegal_move
    hyp_count: int = 0
    seed: int | None = None
    stall_scores: tuple[float | None, ...] | None = None

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


def run_episode(
    spec: AgentSpec,
    rows: int,
    cols: int,
    template: ShapeTemplate,
    ground_truth: Pose,
    *,
    seed: int | None = None,
    initial_cell: Cell | None = None,
    orientations: tuple[int, ...] = (0,),
    feature_variant: str = "accumulate",
    step_cap: int | None = None,
    capture_templates: bool = False,
) -> EpisodeResult:
    """Play one episode to termination and return its result.

    Exactly one of `seed` (seeded random safe initial cell) and
    `initial_cell` must be given. `capture_templates` additionally stores the
    agent-centered 9-value template on every move record, which is what
    demonstration recording needs; it forces feature-map computation even for
    agents that do not use features.
    """
    if (seed is None) == (initial_cell is None):
        raise ValueError("give exactly one of seed and initial_cell")
    if spec.model is not None:
        spec.model.check_fingerprint(
            ConfigFingerprint(rows, cols, template.name, tuple(orientations), feature_variant)
        )
    if seed is not None:
        state = init_episode(rows, cols, template, ground_truth, seed)
    else:
        state = start_episode_at(rows, cols, template, ground_truth, initial_cell)
    start_cell = state.agent_cell
    cap = rows * cols if step_cap is None else step_cap
    h = build_hypothesis_set(state.opened, template, rows, cols, orientations=orientations)

    transcript: list[TranscriptStep] = []
    failure_reason = None
    stall_scores = None
    while True:
        if check_terminal(h):
            state.status = Status.SUCCESS
            decision = terminal_decision()
            transcript.append(TranscriptStep(
                step=state.steps, agent_cell=state.agent_cell,
                action=TERMINAL_ACTION, target=None, outcome=None, hyp_count=len(h),
            ))
            break
        if state.steps >= cap:
            state.status = Status.FAILED_STEP_CAP
            failure_reason = "step_cap"
            break
        feature_map = None
        if spec.needs_features or capture_templates:
            feature_map = idt_feature_map(occupancy_map(h), variant=feature_variant)
        try:
            decision = _decide(spec, state, h, feature_map)
        except NotActionable as exc:
            state.status = Status.FAILED_STALLED
            failure_reason = "not_actionable"
            stall_scores = exc.scores
            break
        except AgentStalled as exc:
            state.status = Status.FAILED_STALLED
            failure_reason = "stalled"
            stall_scores = exc.scores
            break
        captured = None
        if capture_templates:
            captured = tuple(extract_template(feature_map, state.agent_cell))
        pre_cell = state.agent_cell
        try:
            outcome = open_cell(state, decision.target)
        except (AlreadyOpened, OutOfBounds):
            # Only reachable with legality masking disabled.
            state.status = Status.FAILED_STALLED
            failure_reason = "illegal_move"
            break
        if outcome.is_mine:
            failure_reason = "mine"
            transcript.append(TranscriptStep(
                step=state.steps, agent_cell=pre_cell, action=decision.action,
                target=decision.target, outcome="mine", hyp_count=len(h),
                template=captured,
            ))
            break
        h = filter_incremental(h, decision.target, outcome)
        transcript.append(TranscriptStep(
            step=state.steps - 1, agent_cell=pre_cell, action=decision.action,
            target=decision.target, outcome=outcome.count, hyp_count=len(h),
            template=captured,
        ))

    return EpisodeResult(
        status=state.status,
        steps=state.steps,
        ground_truth=ground_truth,
        initial_cell=start_cell,
        transcript=tuple(transcript),
        failure_reason=failure_reason,
        hyp_count=len(h),
        seed=seed,
        stall_scores=stall_scores,
    )


# ---------------------------------------------------------------------------
# Demonstration recording.
# ---------------------------------------------------------------------------


def result_to_demo(
    result: EpisodeResult,
    fingerprint: ConfigFingerprint,
    template: ShapeTemplate,
    source: str = "oracle",
    episode_id: str | None = None,
) -> Demonstration:
    """Convert a successful, template-capturing episode into a demonstration.

    Move records become demo steps; the closing terminal record is dropped
    (direction classifiers learn moves, not the stop action).
    """
    if not result.success:
        raise ValueError("only successful episodes become demonstrations")
    steps = []
    for rec in result.transcript:
        if rec.action == TERMINAL_ACTION:
            continue
        if rec.template is None:
            raise ValueError("episode was not recorded with capture_templates=True")
        steps.append(DemoStep(
            template=rec.template,
            action=rec.action,
            agent_cell=rec.agent_cell,
            chosen_cell=rec.target,
        ))
    return Demonstration(
        episode_id=episode_id or uuid.uuid4().hex[:12],
        steps=tuple(steps),
        source=source,
        fingerprint=fingerprint,
        ground_truth=result.ground_truth,
        initial_cell=result.initial_cell,
        template_offsets=template.offsets,
        template_name=template.name,
    )


def record_demo_corpus(
    rows: int,
    cols: int,
    template: ShapeTemplate,
    n_episodes: int,
    *,
    orientations: tuple[int, ...] = (0,),
    feature_variant: str = "accumulate",
    master_seed: int = 0,
) -> tuple[list[Demonstration], dict]:
    """Run the scripted expert on seeded random (pose, init) pairs.

    Only successful episodes are kept (the expert never hits a mine, but a
    degenerate start could stall it). Returns the demonstrations and a stats
    dict with episode/step/discard counts.
    """
    fingerprint = ConfigFingerprint(rows, cols, template.name, tuple(orientations), feature_variant)
    poses = enumerate_poses(rows, cols, template, orientations=orientations)
    rng = np.random.default_rng(master_seed)
    spec = AgentSpec(kind="oracle")
    demos: list[Demonstration] = []
    discarded = 0
    for i in range(n_episodes):
        pose = poses[int(rng.integers(len(poses)))]
        seed = int(rng.integers(0, 2 ** 63))
        result = run_episode(
            spec, rows, cols, template, pose,
            seed=seed, orientations=orientations,
            feature_variant=feature_variant, capture_templates=True,
        )
        if not result.success:
            discarded += 1
            continue
        demos.append(result_to_demo(result, fingerprint, template, episode_id=f"ep{i:05d}"))
    stats = {
        "episodes": n_episodes,
        "kept": len(demos),
        "discarded": discarded,
        "steps": sum(len(d.steps) for d in demos),
    }
    return demos, stats


# ---------------------------------------------------------------------------
# Paired evaluation protocol.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolConfig:
    rows: int = 10
    cols: int = 10
    template: str = "H3"
    orientations: tuple[int, ...] = (0,)
    feature: str = "accumulate"
    n_poses: int = 10
    n_inits: int = 10
    master_seed: int = 0
    step_cap: int | None = None

    def fingerprint(self) -> ConfigFingerprint:
        return ConfigFingerprint(
            self.rows, self.cols, self.template, tuple(self.orientations), self.feature
        )

    def to_payload(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols, "template": self.template,
            "orientations": list(self.orientations), "feature": self.feature,
            "n_poses": self.n_poses, "n_inits": self.n_inits,
            "master_seed": self.master_seed, "step_cap": self.step_cap,
        }

    @classmethod
    def from_payload(cls, d: dict) -> "ProtocolConfig":
        kwargs = dict(d)
        if "orientations" in kwargs:
            kwargs["orientations"] = tuple(int(o) for o in kwargs["orientations"])
        return cls(**kwargs)


def protocol_draws(config: ProtocolConfig, template: ShapeTemplate):
    """The protocol's seeded draws: poses without replacement, then seeds.

    Factored out so manifests, reports, and tests derive the identical pairs.
    """
    universe = enumerate_poses(config.rows, config.cols, template,
                               orientations=tuple(config.orientations))
    n_poses = min(config.n_poses, len(universe))
    rng = np.random.default_rng(config.master_seed)
    idx = rng.choice(len(universe), size=n_poses, replace=False)
    poses = tuple(universe[int(i)] for i in idx)
    init_seeds = rng.integers(0, 2 ** 63, size=(n_poses, config.n_inits))
    return poses, init_seeds


@dataclass(frozen=True)
class CellReport:
    """One (agent, pose) cell: mean steps over successes plus failure count."""

    mean_steps: float | None
    failures: int
    n: int

    def render(self) -> str:
        mean = "-" if self.mean_steps is None else f"{self.mean_steps:.1f}"
        if self.failures == 0:
            return mean
        return f"{mean};{self.failures}"


@dataclass
class Report:
    config: ProtocolConfig
    agent_names: tuple[str, ...]
    poses: tuple[Pose, ...]
    init_seeds: np.ndarray  # (n_poses, n_inits), the paired seeds
    cells: list[list[CellReport]]  # [agent][pose]
    results: dict[str, list[list[EpisodeResult]]] = field(default_factory=dict)

    def best_per_pose(self) -> list[int | None]:
        """Index of the lowest-mean agent per pose; ties keep the first row."""
        best: list[int | None] = []
        for p in range(len(self.poses)):
            means = [(self.cells[a][p].mean_steps, a)
                     for a in range(len(self.agent_names))
                     if self.cells[a][p].mean_steps is not None]
            best.append(min(means)[1] if means else None)
        return best

    def agent_summary(self, agent: str) -> dict:
        runs = [r for per_pose in self.results[agent] for r in per_pose]
        succ = [r.steps for r in runs if r.success]
        return {
            "runs": len(runs),
            "successes": len(succ),
            "failures": len(runs) - len(succ),
            "mean_steps": float(np.mean(succ)) if succ else None,
        }

    def render_text(self) -> str:
        best = self.best_per_pose()
        headers = ["agent"] + [f"pose{p}" for p in range(len(self.poses))] + ["overall"]
        rows = []
        for a, name in enumerate(self.agent_names):
            cells = []
            for p in range(len(self.poses)):
                text = self.cells[a][p].render()
                if best[p] == a:
                    text += "*"
                cells.append(text)
            summary = self.agent_summary(name)
            overall = ("-" if summary["mean_steps"] is None
                       else f"{summary['mean_steps']:.1f}")
            if summary["failures"]:
                overall += f";{summary['failures']}"
            rows.append([name] + cells + [overall])
        widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        lines = ["agent,pose,mean_steps,failures,n,best"]
        best = self.best_per_pose()
        for a, name in enumerate(self.agent_names):
            for p in range(len(self.poses)):
                cell = self.cells[a][p]
                mean = "" if cell.mean_steps is None else f"{cell.mean_steps:.6f}"
                lines.append(f"{name},{p},{mean},{cell.failures},{cell.n},"
                             f"{1 if best[p] == a else 0}")
        return "\n".join(lines) + "\n"

    def manifest(self) -> dict:
        return {
            "config": self.config.to_payload(),
            "agents": list(self.agent_names),
            "poses": [{"r": p.row, "c": p.col, "orient": p.orient} for p in self.poses],
            "init_seeds": [[int(s) for s in row] for row in self.init_seeds],
        }


def run_protocol(config: ProtocolConfig, agents: list[AgentSpec],
                 template: ShapeTemplate | None = None) -> Report:
    """Run every agent over the same seeded (pose, init) grid."""
    names = [a.name for a in agents]
    if len(set(names)) != len(names):
        raise ValueError("agent names must be unique")
    template = template or resolve_template(config.template)
    poses, init_seeds = protocol_draws(config, template)
    cells: list[list[CellReport]] = []
    results: dict[str, list[list[EpisodeResult]]] = {}
    for spec in agents:
        agent_cells = []
        agent_results = []
        for p, pose in enumerate(poses):
            pose_results = [
                run_episode(
                    spec, config.rows, config.cols, template, pose,
                    seed=int(init_seeds[p, j]),
                    orientations=tuple(config.orientations),
                    feature_variant=config.feature,
                    step_cap=config.step_cap,
                )
                for j in range(config.n_inits)
            ]
            succ = [r.steps for r in pose_results if r.success]
            agent_cells.append(CellReport(
                mean_steps=float(np.mean(succ)) if succ else None,
                failures=len(pose_results) - len(succ),
                n=len(pose_results),
            ))
            agent_results.append(pose_results)
        cells.append(agent_cells)
        results[spec.name] = agent_results
    return Report(
        config=config,
        agent_names=tuple(names),
        poses=poses,
        init_seeds=init_seeds,
        cells=cells,
        results=results,
    )


# ---------------------------------------------------------------------------
# Episode transcripts (JSON lines): a manifest record, one record per move,
# and a closing result record. Deterministic byte-for-byte for fixed inputs.
# ---------------------------------------------------------------------------


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dump(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def write_transcript(
    path,
    result: EpisodeResult,
    config: ProtocolConfig,
    agent_name: str,
    model_path=None,
) -> None:
    manifest = {
        "kind": "manifest",
        "config": config.to_payload(),
        "agent": agent_name,
        "seed": result.seed,
        "ground_truth": {"r": result.ground_truth.row, "c": result.ground_truth.col,
                         "orient": result.ground_truth.orient},
        "initial_cell": list(result.initial_cell),
        "model": None if model_path is None else {
            "path": str(model_path), "sha256": file_sha256(model_path),
        },
    }
    lines = [_dump(manifest)]
    for rec in result.transcript:
        lines.append(_dump({
            "kind": "step",
            "step": rec.step,
            "agent": list(rec.agent_cell),
            "action": rec.action,
            "target": None if rec.target is None else list(rec.target),
            "outcome": rec.outcome,
            "hyp_count": rec.hyp_count,
        }))
    lines.append(_dump({
        "kind": "result",
        "status": result.status.value,
        "steps": result.steps,
        "failure_reason": result.failure_reason,
        "hyp_count": result.hyp_count,
    }))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def replay_transcript(path, template: ShapeTemplate | None = None) -> EpisodeResult:
    """Re-execute a transcript's moves through the engine and verify it.

    Checks every recorded outcome and post-filter hypothesis count against
    the recomputed values and the final status line; any disagreement raises
    DemoReplayError. Returns the reconstructed result.
    """
    with open(path, "r", encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if not records or records[0].get("kind") != "manifest":
        raise DemoReplayError("transcript must start with a manifest record")
    manifest = records[0]
    config = ProtocolConfig.from_payload(manifest["config"])
    template = template or resolve_template(config.template)
    gt = Pose(manifest["ground_truth"]["r"], manifest["ground_truth"]["c"],
              manifest["ground_truth"].get("orient", 0))
    state = start_episode_at(config.rows, config.cols, template, gt,
                             tuple(manifest["initial_cell"]))
    h = build_hypothesis_set(state.opened, template, config.rows, config.cols,
                             orientations=tuple(config.orientations))
    transcript = []
    failure_reason = None
    for rec in records[1:]:
        if rec["kind"] == "result":
            if rec["status"] != state.status.value and rec["status"] not in (
                Status.FAILED_STALLED.value, Status.FAILED_STEP_CAP.value,
            ):
                raise DemoReplayError(
                    f"recorded status {rec['status']} != replayed {state.status.value}"
                )
            if rec["steps"] != state.steps:
                raise DemoReplayError(f"recorded steps {rec['steps']} != {state.steps}")
            failure_reason = rec["failure_reason"]
            if rec["status"] != state.status.value:
                state.status = Status(rec["status"])
            continue
        if rec["kind"] != "step":
            raise DemoReplayError(f"unknown transcript record kind {rec.get('kind')!r}")
        if rec["action"] == TERMINAL_ACTION:
            if not check_terminal(h):
                raise DemoReplayError("terminal action recorded before belief collapse")
            state.status = Status.SUCCESS
            transcript.append(TranscriptStep(
                step=rec["step"], agent_cell=tuple(rec["agent"]),
                action=TERMINAL_ACTION, target=None, outcome=None, hyp_count=len(h),
            ))
            continue
        target = tuple(rec["target"])
        outcome = open_cell(state, target)
        observed = "mine" if outcome.is_mine else outcome.count
        if observed != rec["outcome"]:
            raise DemoReplayError(
                f"step {rec['step']}: recorded outcome {rec['outcome']} != {observed}"
            )
        if not outcome.is_mine:
            h = filter_incremental(h, target, outcome)
        if len(h) != rec["hyp_count"]:
            raise DemoReplayError(
                f"step {rec['step']}: recorded hyp_count {rec['hyp_count']} != {len(h)}"
            )
        transcript.append(TranscriptStep(
            step=rec["step"], agent_cell=tuple(rec["agent"]), action=rec["action"],
            target=target, outcome=rec["outcome"], hyp_count=len(h),
        ))
    return EpisodeResult(
        status=state.status,
        steps=state.steps,
        ground_truth=gt,
        initial_cell=tuple(manifest["initial_cell"]),
        transcript=tuple(transcript),
        failure_reason=failure_reason,
        hyp_count=len(h),
        seed=manifest.get("seed"),
    )
