"""Command-line entry points: simulate, demo-gen, train, eval, serve.

Settings resolve as flag > config file > built-in default. The config file
is JSON mirroring ProtocolConfig at the top level, with optional per-command
sections ("simulate", "demo_gen", "train", "eval", "serve") for
command-specific keys. The HYPSWEEP_CONFIG environment variable supplies the
config path when --config is not given; it overrides nothing else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .grid import Pose, enumerate_poses
from .harness import (
    AgentSpec,
    ProtocolConfig,
    record_demo_corpus,
    resolve_template,
    run_episode,
    run_protocol,
    write_transcript,
)
from .learning import (
    Hyperparams,
    build_binary_dataset,
    build_mc_dataset,
    load_model,
    read_demos,
    save_model,
    train_linear,
    write_demos,
)

CONFIG_ENV_VAR = "HYPSWEEP_CONFIG"
PROTOCOL_KEYS = ("rows", "cols", "template", "orientations", "feature",
                 "n_poses", "n_inits", "master_seed", "step_cap")


def load_config(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


def _setting(flag_value, config: dict, section: str, key: str, default):
    """flag > per-command section > top level > default."""
    if flag_value is not None:
        return flag_value
    sec = config.get(section, {})
    if isinstance(sec, dict) and key in sec:
        return sec[key]
    if key in config:
        return config[key]
    return default


def _parse_pose(text: str) -> Pose:
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 2:
        return Pose(parts[0], parts[1])
    if len(parts) == 3:
        return Pose(parts[0], parts[1], parts[2])
    raise argparse.ArgumentTypeError("pose must be 'row,col' or 'row,col,orient'")


def _parse_orientations(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypsweep",
        description="Hypothesis-tracking grid game: simulate, record, train, evaluate, serve.",
    )
    parser.add_argument("--config", help="JSON config file (or set $" + CONFIG_ENV_VAR + ")")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one episode")
    sim.add_argument("--agent", choices=("oracle", "hp", "mc", "b8", "be"))
    sim.add_argument("--rows", type=int)
    sim.add_argument("--cols", type=int)
    sim.add_argument("--template")
    sim.add_argument("--orientations", type=_parse_orientations)
    sim.add_argument("--feature", choices=("accumulate", "nearest"))
    sim.add_argument("--seed", type=int)
    sim.add_argument("--pose", type=_parse_pose, help="fixed ground truth 'row,col[,orient]'")
    sim.add_argument("--model", help="model file for mc/b8/be")
    sim.add_argument("--transcript", help="write a JSONL transcript here")

    gen = sub.add_parser("demo-gen", help="record an expert demonstration corpus")
    gen.add_argument("--episodes", type=int)
    gen.add_argument("--out")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--template")
    gen.add_argument("--orientations", type=_parse_orientations)
    gen.add_argument("--feature", choices=("accumulate", "nearest"))

    tr = sub.add_parser("train", help="train a model from demonstrations")
    tr.add_argument("--demos")
    tr.add_argument("--agent-kind", choices=("mc", "b8", "be"))
    tr.add_argument("--out")
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--lambda", dest="lam", type=float)
    tr.add_argument("--eta0", type=float)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--negatives", type=int, help="negatives per positive (be datasets)")

    ev = sub.add_parser("eval", help="run the paired evaluation protocol")
    ev.add_argument("--agents", help="comma list, e.g. oracle,hp,mc,b8")
    ev.add_argument("--model", action="append", default=None, metavar="KIND=PATH",
                    help="model file for a learned agent (repeatable)")
    ev.add_argument("--out", help="directory for report.txt, report.csv, manifest.json")
    ev.add_argument("--rows", type=int)
    ev.add_argument("--cols", type=int)
    ev.add_argument("--template")
    ev.add_argument("--orientations", type=_parse_orientations)
    ev.add_argument("--feature", choices=("accumulate", "nearest"))
    ev.add_argument("--n-poses", type=int)
    ev.add_argument("--n-inits", type=int)
    ev.add_argument("--seed", type=int, help="protocol master seed")

    srv = sub.add_parser("serve", help="run the session service")
    srv.add_argument("--host")
    srv.add_argument("--port", type=int)
    srv.add_argument("--models-dir")
    srv.add_argument("--demo-store")
    srv.add_argument("--failure-store")
    srv.add_argument("--debug", action="store_true", default=None)

    return parser


def _protocol_config(args, config: dict, section: str) -> ProtocolConfig:
    def get(key, default, flag=None):
        return _setting(flag, config, section, key, default)

    orientations = _setting(getattr(args, "orientations", None), config, section,
                            "orientations", (0,))
    return ProtocolConfig(
        rows=int(get("rows", 10, getattr(args, "rows", None))),
        cols=int(get("cols", 10, getattr(args, "cols", None))),
        template=str(get("template", "H3", getattr(args, "template", None))),
        orientations=tuple(int(o) for o in orientations),
        feature=str(get("feature", "accumulate", getattr(args, "feature", None))),
        n_poses=int(get("n_poses", 10, getattr(args, "n_poses", None))),
        n_inits=int(get("n_inits", 10, getattr(args, "n_inits", None))),
        master_seed=int(get("master_seed", 0, getattr(args, "seed", None))),
        step_cap=get("step_cap", None),
    )


def cmd_simulate(args, config: dict) -> int:
    pc = _protocol_config(args, config, "simulate")
    agent_kind = _setting(args.agent, config, "simulate", "agent", "oracle")
    model_path = _setting(args.model, config, "simulate", "model", None)
    seed = int(_setting(args.seed, config, "simulate", "seed", 0))
    transcript_path = _setting(args.transcript, config, "simulate", "transcript", None)

    template = resolve_template(pc.template)
    model = load_model(model_path) if model_path else None
    spec = AgentSpec(kind=agent_kind, model=model)

    pose = _setting(args.pose, config, "simulate", "pose", None)
    rng = np.random.default_rng(seed)
    universe = enumerate_poses(pc.rows, pc.cols, template, orientations=pc.orientations)
    if pose is None:
        pose = universe[int(rng.integers(len(universe)))]
    elif not isinstance(pose, Pose):
        pose = Pose(*[int(v) for v in pose])
    init_seed = int(rng.integers(0, 2 ** 63))

    result = run_episode(
        spec, pc.rows, pc.cols, template, pose,
        seed=init_seed, orientations=pc.orientations,
        feature_variant=pc.feature, step_cap=pc.step_cap,
    )
    print(f"agent: {spec.name}")
    print(f"pose: {pose.row},{pose.col},{pose.orient}")
    print(f"initial_cell: {result.initial_cell[0]},{result.initial_cell[1]}")
    print(f"status: {result.status.value}")
    print(f"steps: {result.steps}")
    print(f"hyp_count: {result.hyp_count}")
    if result.failure_reason:
        print(f"failure_reason: {result.failure_reason}")
    if transcript_path:
        write_transcript(transcript_path, result, pc, spec.name, model_path=model_path)
        print(f"transcript: {transcript_path}")
    return 0 if result.success else 1


def cmd_demo_gen(args, config: dict) -> int:
    pc = _protocol_config(args, config, "demo_gen")
    episodes = int(_setting(args.episodes, config, "demo_gen", "episodes", 100))
    out = _setting(args.out, config, "demo_gen", "out", "demos/oracle_demos.jsonl")
    seed = int(_setting(args.seed, config, "demo_gen", "seed", 0))

    template = resolve_template(pc.template)
    demos, stats = record_demo_corpus(
        pc.rows, pc.cols, template, episodes,
        orientations=pc.orientations, feature_variant=pc.feature, master_seed=seed,
    )
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    write_demos(out, demos)
    print(f"episodes: {stats['episodes']}")
    print(f"kept: {stats['kept']}")
    print(f"discarded: {stats['discarded']}")
    print(f"steps: {stats['steps']}")
    print(f"out: {out}")
    return 0


def cmd_train(args, config: dict) -> int:
    demos_path = _setting(args.demos, config, "train", "demos", "demos/oracle_demos.jsonl")
    agent_kind = _setting(args.agent_kind, config, "train", "agent_kind", "mc")
    out = _setting(args.out, config, "train", "out", f"models/{agent_kind}.json")
    hp = Hyperparams(
        epochs=int(_setting(args.epochs, config, "train", "epochs", 200)),
        eta0=float(_setting(args.eta0, config, "train", "eta0", 0.1)),
        lam=float(_setting(args.lam, config, "train", "lambda", 1e-3)),
        seed=int(_setting(args.seed, config, "train", "seed", 0)),
    )
    negatives = int(_setting(args.negatives, config, "train", "negatives", 4))

    demos = read_demos(demos_path)
    if agent_kind == "mc":
        dataset = build_mc_dataset(demos)
    else:
        dataset = build_binary_dataset(demos, mode=agent_kind,
                                       negatives_per_positive=negatives, seed=hp.seed)
    model, report = train_linear(dataset, hp)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)
    print(f"demos: {len(demos)}")
    print(f"rows: {dataset.X.shape[0]}")
    print(f"training_accuracy: {report.accuracy:.4f}")
    if report.objectives:
        print(f"final_objective: {report.objectives[-1]:.6f}")
    if model.never_predictable:
        print(f"never_predictable: {list(model.never_predictable)}")
    print(f"out: {out}")
    return 0


def cmd_eval(args, config: dict) -> int:
    pc = _protocol_config(args, config, "eval")
    agents_text = _setting(args.agents, config, "eval", "agents", "oracle,hp")
    if isinstance(agents_text, str):
        agent_kinds = [a.strip() for a in agents_text.split(",") if a.strip()]
    else:
        agent_kinds = list(agents_text)
    model_flags = args.model or []
    model_map = dict(_setting(None, config, "eval", "models", {}) or {})
    for item in model_flags:
        kind, _, path = item.partition("=")
        if not path:
            raise SystemExit(f"--model wants KIND=PATH, got {item!r}")
        model_map[kind] = path
    out_dir = _setting(args.out, config, "eval", "out", None)

    specs = []
    for kind in agent_kinds:
        model = None
        if kind in ("mc", "b8", "be"):
            if kind not in model_map:
                raise SystemExit(f"agent {kind!r} needs --model {kind}=PATH")
            model = load_model(model_map[kind])
        specs.append(AgentSpec(kind=kind, model=model))

    report = run_protocol(pc, specs)
    text = report.render_text()
    print(text, end="")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        (out / "report.csv").write_text(report.render_csv(), encoding="utf-8")
        manifest = report.manifest()
        manifest["models"] = {k: str(v) for k, v in model_map.items() if k in agent_kinds}
        (out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote: {out / 'report.txt'}")
    return 0


def cmd_serve(args, config: dict) -> int:
    from .service import Settings, main_serve

    settings = Settings(
        models_dir=_setting(args.models_dir, config, "serve", "models_dir", "models"),
        demo_store=_setting(args.demo_store, config, "serve", "demo_store",
                            "demos/human_demos.jsonl"),
        failure_store=_setting(args.failure_store, config, "serve", "failure_store",
                               "demos/human_failures.jsonl"),
        debug=bool(_setting(args.debug, config, "serve", "debug", False)),
    )
    host = _setting(args.host, config, "serve", "host", "127.0.0.1")
    port = int(_setting(args.port, config, "serve", "port", 8000))
    main_serve(host=host, port=port, settings=settings)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = load_config(args.config)
    handlers = {
        "simulate": cmd_simulate,
        "demo-gen": cmd_demo_gen,
        "train": cmd_train,
        "eval": cmd_eval,
        "serve": cmd_serve,
    }
    return handlers[args.command](args, config)


if __name__ == "__main__":
    sys.exit(main())
