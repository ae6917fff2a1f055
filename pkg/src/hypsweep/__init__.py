"""Exact belief tracking and policy learning on a hidden-shape grid game.

A hidden shape of mines sits on a grid; an agent opens cells, each revealing
the count of mine cells among its 8 neighbors, and maintains the exact set of
shape placements consistent with everything seen. The package provides the
game engine, the hypothesis filter, an inverse-distance feature map over the
belief, scripted and learned agents, an imitation-learning trainer, a paired
evaluation harness, and an HTTP session service for interactive play.
"""

from .errors import (
    AgentStalled,
    AlreadyOpened,
    BeliefCollapse,
    DemoReplayError,
    EmptyDataset,
    EmptyFrontier,
    EmptyUniverse,
    EpisodeOver,
    FingerprintMismatchWarning,
    HypsweepError,
    MixedConfig,
    NonFiniteLoss,
    NotActionable,
    OutOfBounds,
)
from .grid import (
    ALL_ORIENTATIONS,
    BUILTIN_TEMPLATES,
    DIRECTION_NAMES,
    DIRECTION_VECTORS,
    H3,
    TERMINAL_ACTION,
    EpisodeState,
    OpenOutcome,
    Pose,
    ShapeTemplate,
    Status,
    direction_class,
    enumerate_poses,
    init_episode,
    neighbors8,
    open_cell,
    rotated_offsets,
    shape_cells,
    start_episode_at,
    true_count,
)
from .hypothesis import (
    HypothesisSet,
    build_hypothesis_set,
    filter_incremental,
    is_consistent,
    occupancy_map,
)
from .features import FEATURE_VARIANTS, extract_template, idt_feature_map
from .agents import (
    Decision,
    b8_action,
    be_action,
    check_terminal,
    frontier_cells,
    heuristic_action,
    mc_action,
    oracle_expert_action,
    terminal_decision,
)
from .learning import (
    ConfigFingerprint,
    Dataset,
    Demonstration,
    DemoStep,
    Hyperparams,
    LinearModel,
    TrainReport,
    build_binary_dataset,
    build_mc_dataset,
    load_model,
    read_demos,
    replay_demo,
    save_model,
    train_linear,
    write_demos,
)
from .harness import (
    AgentSpec,
    CellReport,
    EpisodeResult,
    ProtocolConfig,
    Report,
    record_demo_corpus,
    replay_transcript,
    resolve_template,
    run_episode,
    run_protocol,
    write_transcript,
)

__version__ = "0.1.0"

__all__ = [
    "AgentSpec",
    "AgentStalled",
    "AlreadyOpened",
    "ALL_ORIENTATIONS",
    "b8_action",
    "be_action",
    "BeliefCollapse",
    "build_binary_dataset",
    "build_hypothesis_set",
    "build_mc_dataset",
    "BUILTIN_TEMPLATES",
    "CellReport",
    "check_terminal",
    "ConfigFingerprint",
    "Dataset",
    "Decision",
    "Demonstration",
    "DemoReplayError",
    "DemoStep",
    "direction_class",
    "DIRECTION_NAMES",
    "DIRECTION_VECTORS",
    "EmptyDataset",
    "EmptyFrontier",
    "EmptyUniverse",
    "enumerate_poses",
    "EpisodeOver",
    "EpisodeResult",
    "EpisodeState",
    "extract_template",
    "FEATURE_VARIANTS",
    "filter_incremental",
    "FingerprintMismatchWarning",
    "frontier_cells",
    "H3",
    "heuristic_action",
    "Hyperparams",
    "HypothesisSet",
    "HypsweepError",
    "idt_feature_map",
    "init_episode",
    "is_consistent",
    "LinearModel",
    "load_model",
    "mc_action",
    "MixedConfig",
    "neighbors8",
    "NonFiniteLoss",
    "NotActionable",
    "occupancy_map",
    "open_cell",
    "OpenOutcome",
    "oracle_expert_action",
    "OutOfBounds",
    "Pose",
    "ProtocolConfig",
    "read_demos",
    "record_demo_corpus",
    "replay_demo",
    "replay_transcript",
    "Report",
    "resolve_template",
    "rotated_offsets",
    "run_episode",
    "run_protocol",
    "save_model",
    "shape_cells",
    "ShapeTemplate",
    "start_episode_at",
    "Status",
    "terminal_decision",
    "TERMINAL_ACTION",
    "train_linear",
    "TrainReport",
    "true_count",
    "write_demos",
    "write_transcript",
]
