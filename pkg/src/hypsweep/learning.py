"""Datasets from demonstrations and deterministic linear-classifier training.

Training rows are (9-value local template, label) pairs. The multiclass
dataset labels each expert step with the direction class the expert took.
Binary datasets label templates "actionable" (+1) at expert-chosen cells and
(-1) elsewhere: for b8 mode the negatives are the other legal neighbors of
the expert's position, for be mode they are seeded-random frontier cells.

Binary builders need templates at cells the expert did not choose, which the
recorded step rows alone cannot provide; each demonstration therefore carries
its episode header (ground truth, initial cell) and is replayed exactly
through the world engine and belief filter to recover per-step feature maps.

The trainer is primal subgradient descent on L2-regularized hinge loss,
one-vs-all for the multiclass case: dependency-free, deterministic, and
entirely adequate at 9 input dimensions. Each epoch sweeps the shuffled
dataset with per-example subgradient steps at the per-epoch step size
eta_t = eta0 / (1 + lambda * eta0 * t); an epoch that would raise the full
regularized objective is rejected (weights revert to the epoch start), which
keeps the reported objective sequence non-increasing — subgradient steps on
their own are not descent steps.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    DemoReplayError,
    EmptyDataset,
    FingerprintMismatchWarning,
    MixedConfig,
    NonFiniteLoss,
)
from .features import extract_template, idt_feature_map
from .grid import (
    Cell,
    Pose,
    ShapeTemplate,
    direction_class,
    open_cell,
    start_episode_at,
)
from .hypothesis import build_hypothesis_set, filter_incremental, occupancy_map
from .agents import frontier_cells

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ConfigFingerprint:
    """Identity of the data-generating configuration a model is bound to."""

    rows: int
    cols: int
    template: str
    orientations: tuple[int, ...]
    feature: str

    def to_payload(self) -> dict:
        d = asdict(self)
        d["orientations"] = list(self.orientations)
        return d

    @classmethod
    def from_payload(cls, d: dict) -> "ConfigFingerprint":
        return cls(
            rows=int(d["rows"]),
            cols=int(d["cols"]),
            template=str(d["template"]),
            orientations=tuple(int(o) for o in d["orientations"]),
            feature=str(d["feature"]),
        )


@dataclass(frozen=True)
class DemoStep:
    """One expert move, with the template captured before the move's outcome."""

    template: tuple[float, ...]  # 9 values, agent-centered
    action: int | None  # direction class; None for a relocation move
    agent_cell: Cell
    chosen_cell: Cell


@dataclass(frozen=True)
class Demonstration:
    episode_id: str
    steps: tuple[DemoStep, ...]
    source: str  # "oracle" | "human"
    fingerprint: ConfigFingerprint
    ground_truth: Pose
    initial_cell: Cell
    template_offsets: frozenset[tuple[int, int]]
    template_name: str = ""

    def shape_template(self) -> ShapeTemplate:
        return ShapeTemplate(
            name=self.template_name or self.fingerprint.template,
            offsets=self.template_offsets,
        )


@dataclass(frozen=True)
class Dataset:
    """Training rows: X is (n, 9), y holds class ids 0-7 or labels in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray
    kind: str  # "multiclass8" | "binary"
    fingerprint: ConfigFingerprint


def _require_shared_fingerprint(demos: list[Demonstration]) -> ConfigFingerprint:
    if not demos:
        raise EmptyDataset("no demonstrations given")
    fp = demos[0].fingerprint
    for d in demos[1:]:
        if d.fingerprint != fp:
            raise MixedConfig(
                f"demonstration {d.episode_id} fingerprint {d.fingerprint} != {fp}"
            )
    return fp


def build_mc_dataset(demos: list[Demonstration]) -> Dataset:
    """One row per adjacent expert step, labeled with the chosen direction.

    Relocation steps (chosen cell not 8-adjacent) have no direction class and
    are skipped with a warning.
    """
    fp = _require_shared_fingerprint(demos)
    rows, labels = [], []
    skipped = 0
    for demo in demos:
        for step in demo.steps:
            action = direction_class(step.agent_cell, step.chosen_cell)
            if action is None:
                skipped += 1
                continue
            rows.append(step.template)
            labels.append(action)
    if skipped:
        warnings.warn(f"skipped {skipped} relocation step(s) without a direction class")
    if not rows:
        raise EmptyDataset("no adjacent expert steps to learn from")
    return Dataset(
        X=np.asarray(rows, dtype=float),
        y=np.asarray(labels, dtype=int),
        kind="multiclass8",
        fingerprint=fp,
    )


def replay_demo(demo: Demonstration):
    """Yield (state, feature_map, step) with the pre-move world and features.

    Replays the recorded episode through the real engine; a mismatch between
    a recorded template and its replayed value means the corpus and config
    no longer agree and is a hard error.
    """
    fp = demo.fingerprint
    template = demo.shape_template()
    state = start_episode_at(fp.rows, fp.cols, template, demo.ground_truth, demo.initial_cell)
    h = build_hypothesis_set(
        state.opened, template, fp.rows, fp.cols, orientations=fp.orientations
    )
    for step in demo.steps:
        fm = idt_feature_map(occupancy_map(h), variant=fp.feature)
        recorded = np.asarray(step.template, dtype=float)
        if not np.allclose(extract_template(fm, step.agent_cell), recorded, atol=1e-9):
            raise DemoReplayError(
                f"episode {demo.episode_id}: replayed template at {step.agent_cell} "
                "does not match the recorded one"
            )
        yield state, fm, step
        outcome = open_cell(state, step.chosen_cell)
        if outcome.is_mine:
            raise DemoReplayError(
                f"episode {demo.episode_id}: recorded step opens a mine at {step.chosen_cell}"
            )
        h = filter_incremental(h, step.chosen_cell, outcome)


def _legal_neighbors(state) -> list[Cell]:
    from .agents import _legal_neighbor_slots

    return [cell for _, cell in _legal_neighbor_slots(state)]


def build_binary_dataset(
    demos: list[Demonstration],
    mode: str,
    negatives_per_positive: int = 4,
    seed: int = 0,
) -> Dataset:
    """Actionable/not-actionable rows for the b8 or be agent.

    b8: negatives are the other legal neighbors of the expert position.
    be: negatives are `negatives_per_positive` seeded-random frontier cells
    the expert did not choose (capped by frontier size).
    """
    if mode not in ("b8", "be"):
        raise ValueError(f"mode must be 'b8' or 'be', got {mode!r}")
    fp = _require_shared_fingerprint(demos)
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for demo in demos:
        for state, fm, step in replay_demo(demo):
            rows.append(tuple(extract_template(fm, step.chosen_cell)))
            labels.append(1)
            if mode == "b8":
                negatives = [
                    cell for cell in _legal_neighbors(state) if cell != step.chosen_cell
                ]
            else:
                pool = [c for c in frontier_cells(state) if c != step.chosen_cell]
                k = min(negatives_per_positive, len(pool))
                idx = rng.choice(len(pool), size=k, replace=False) if k else []
                negatives = [pool[i] for i in sorted(int(i) for i in idx)]
            for cell in negatives:
                rows.append(tuple(extract_template(fm, cell)))
                labels.append(-1)
    if not rows:
        raise EmptyDataset("no demonstration steps to learn from")
    return Dataset(
        X=np.asarray(rows, dtype=float),
        y=np.asarray(labels, dtype=int),
        kind="binary",
        fingerprint=fp,
    )


@dataclass(frozen=True)
class Hyperparams:
    epochs: int = 200
    eta0: float = 0.1
    lam: float = 1e-3
    seed: int = 0

    def to_payload(self) -> dict:
        return asdict(self)


@dataclass
class LinearModel:
    kind: str  # "multiclass8" | "binary"
    weights: np.ndarray  # (n_classes, 9)
    biases: np.ndarray  # (n_classes,)
    fingerprint: ConfigFingerprint
    hyperparams: Hyperparams
    never_predictable: tuple[int, ...] = ()

    @property
    def classes(self) -> int:
        return self.weights.shape[0]

    def check_fingerprint(self, fp: ConfigFingerprint) -> None:
        if fp != self.fingerprint:
            warnings.warn(
                f"model trained on {self.fingerprint} used with {fp}",
                FingerprintMismatchWarning,
            )


@dataclass
class TrainReport:
    objectives: list[float]  # per-epoch regularized hinge objective (class mean)
    per_class_objectives: dict[int, list[float]]
    accuracy: float
    class_counts: dict[int, int]


def _objective(X, y, w, b, lam: float) -> float:
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).mean()
    return 0.5 * lam * float(w @ w) + float(hinge)


def _train_binary_problem(X, y, hp: Hyperparams, rng) -> tuple[np.ndarray, float, list[float]]:
    """Subgradient epochs for one +/-1 problem; returns (w, b, objective curve)."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    prev = _objective(X, y, w, b, hp.lam)
    curve = []
    for epoch in range(1, hp.epochs + 1):
        eta = hp.eta0 / (1.0 + hp.lam * hp.eta0 * epoch)
        order = rng.permutation(n)
        w_start, b_start = w.copy(), b
        for i in order:
            xi, yi = X[i], y[i]
            active = yi * (w @ xi + b) < 1.0
            w *= 1.0 - eta * hp.lam
            if active:
                w += eta * yi * xi
                b += eta * yi
        obj = _objective(X, y, w, b, hp.lam)
        if not np.isfinite(obj):
            raise NonFiniteLoss(f"objective diverged at epoch {epoch}")
        if obj > prev:
            w, b = w_start, b_start
            obj = prev
        curve.append(obj)
        prev = obj
    return w, b, curve


def train_linear(dataset: Dataset, hp: Hyperparams = Hyperparams()) -> tuple[LinearModel, TrainReport]:
    """Train a one-vs-all multiclass or single binary hinge classifier.

    Deterministic given (dataset order, hyperparameters, seed). Multiclass
    classes absent from the data keep zero weights and are flagged
    never-predictable so inference masks them out.
    """
    if dataset.X.size == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    X = np.asarray(dataset.X, dtype=float)
    if dataset.kind == "multiclass8":
        class_ids = list(range(8))
    elif dataset.kind == "binary":
        class_ids = [0]
    else:
        raise ValueError(f"unknown dataset kind {dataset.kind!r}")

    weights = np.zeros((len(class_ids), X.shape[1]))
    biases = np.zeros(len(class_ids))
    per_class: dict[int, list[float]] = {}
    never = []
    counts: dict[int, int] = {}
    for cid in class_ids:
        if dataset.kind == "multiclass8":
            y = np.where(dataset.y == cid, 1.0, -1.0)
            counts[cid] = int((dataset.y == cid).sum())
            if counts[cid] == 0:
                never.append(cid)
                continue
        else:
            y = dataset.y.astype(float)
            counts[1] = int((dataset.y > 0).sum())
            counts[-1] = int((dataset.y < 0).sum())
        rng = np.random.default_rng([hp.seed, cid])
        w, b, curve = _train_binary_problem(X, y, hp, rng)
        weights[cid] = w
        biases[cid] = b
        per_class[cid] = curve

    trained = sorted(per_class)
    objectives = [
        float(np.mean([per_class[cid][e] for cid in trained]))
        for e in range(hp.epochs)
    ] if trained else []

    if dataset.kind == "multiclass8":
        raw = X @ weights.T + biases
        if never:
            raw[:, never] = -np.inf
        predicted = raw.argmax(axis=1)
        accuracy = float((predicted == dataset.y).mean())
    else:
        predicted = np.where(X @ weights[0] + biases[0] > 0.0, 1, -1)
        accuracy = float((predicted == dataset.y).mean())

    model = LinearModel(
        kind=dataset.kind,
        weights=weights,
        biases=biases,
        fingerprint=dataset.fingerprint,
        hyperparams=hp,
        never_predictable=tuple(never),
    )
    report = TrainReport(
        objectives=objectives,
        per_class_objectives=per_class,
        accuracy=accuracy,
        class_counts=counts,
    )
    return model, report


def save_model(model: LinearModel, path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "classes": model.classes,
        "weights": [[float(v) for v in row] for row in model.weights],
        "biases": [float(v) for v in model.biases],
        "never_predictable": list(model.never_predictable),
        "fingerprint": model.fingerprint.to_payload(),
        "hyperparameters": model.hyperparams.to_payload(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')!r}")
    return LinearModel(
        kind=doc["kind"],
        weights=np.asarray(doc["weights"], dtype=float),
        biases=np.asarray(doc["biases"], dtype=float),
        fingerprint=ConfigFingerprint.from_payload(doc["fingerprint"]),
        hyperparams=Hyperparams(**doc["hyperparameters"]),
        never_predictable=tuple(int(c) for c in doc.get("never_predictable", ())),
    )


# ---------------------------------------------------------------------------
# Demonstration corpus serialization (JSON lines).
#
# Step records carry {episode_id, step, template, action, agent_cell,
# chosen_cell, source}; each episode is preceded by a header record holding
# the replay context (fingerprint, ground truth, initial cell, offsets).
# ---------------------------------------------------------------------------


def demo_to_lines(demo: Demonstration) -> list[str]:
    header = {
        "kind": "episode",
        "episode_id": demo.episode_id,
        "source": demo.source,
        "fingerprint": demo.fingerprint.to_payload(),
        "ground_truth": {"r": demo.ground_truth.row, "c": demo.ground_truth.col,
                         "orient": demo.ground_truth.orient},
        "initial_cell": list(demo.initial_cell),
        "template_name": demo.template_name or demo.fingerprint.template,
        "template_offsets": sorted(list(o) for o in demo.template_offsets),
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for i, step in enumerate(demo.steps):
        rec = {
            "kind": "step",
            "episode_id": demo.episode_id,
            "step": i,
            "template": [float(v) for v in step.template],
            "action": step.action,
            "agent_cell": list(step.agent_cell),
            "chosen_cell": list(step.chosen_cell),
            "source": demo.source,
        }
        if step.action is None:
            rec["reloc"] = True
        lines.append(json.dumps(rec, separators=(",", ":")))
    return lines


def write_demos(path, demos: list[Demonstration]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for demo in demos:
            for line in demo_to_lines(demo):
                fh.write(line + "\n")


def append_demo(path, demo: Demonstration) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for line in demo_to_lines(demo):
            fh.write(line + "\n")


def read_demos(path) -> list[Demonstration]:
    demos: list[Demonstration] = []
    header = None
    steps: list[DemoStep] = []

    def flush():
        nonlocal header, steps
        if header is not None:
            demos.append(
                Demonstration(
                    episode_id=header["episode_id"],
                    steps=tuple(steps),
                    source=header["source"],
                    fingerprint=ConfigFingerprint.from_payload(header["fingerprint"]),
                    ground_truth=Pose(
                        header["ground_truth"]["r"],
                        header["ground_truth"]["c"],
                        header["ground_truth"].get("orient", 0),
                    ),
                    initial_cell=tuple(header["initial_cell"]),
                    template_offsets=frozenset(
                        (int(r), int(c)) for r, c in header["template_offsets"]
                    ),
                    template_name=header.get("template_name", ""),
                )
            )
        header, steps = None, []

    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("kind") == "episode":
                flush()
                header = rec
            elif rec.get("kind") == "step":
                if header is None or rec["episode_id"] != header["episode_id"]:
                    raise ValueError("step record without its episode header")
                steps.append(
                    DemoStep(
                        template=tuple(float(v) for v in rec["template"]),
                        action=rec["action"],
                        agent_cell=tuple(rec["agent_cell"]),
                        chosen_cell=tuple(rec["chosen_cell"]),
                    )
                )
            else:
                raise ValueError(f"unknown corpus record kind {rec.get('kind')!r}")
    flush()
    return demos
