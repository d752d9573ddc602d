"""Command-line entry points wiring configuration to training, evaluation,
region analysis, and exports.

Verbs::

    uavjam train-uav      --config c.yaml [--seed N] [--out DIR]
    uavjam train-jammer   --config c.yaml [--seed N] [--out DIR]
    uavjam train-defense  --config c.yaml [--seed N] [--out DIR] [--assumption {1,2}]
    uavjam eval           --config c.yaml [--seed N] [--out DIR]
                          [--episodes N] [--export-traj] [--workers N]
    uavjam region         --config c.yaml [--seed N] [--out DIR]
                          [--resolution M] [--at SECONDS]

Every command echoes the fully-resolved configuration (defaults
materialized) to stdout and to ``<out>/resolved_config.yaml``, so any run is
reproducible from its echo alone.

Exit codes: 0 success, 2 configuration error, 3 checkpoint error,
4 numerical failure during training.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Optional

from . import world
from .agent import DefenseConfig, DefenseMode, uav_feature_length
from .config import (ConfigError, RunConfig, dump_yaml, load_config,
                     resolved_dict, with_overrides)
from .jammers import JammerKind, emission
from .learner import (CheckpointError, NumericalError, QNetwork,
                      load_checkpoint, save_checkpoint, train,
                      write_curve_csv)
from .learner import evaluate as greedy_evaluate
from .motion import Vec2
from .radio import RegionScene, reliable_region, write_region_csv
from .tasks import FrozenUavPolicy, JammerTask, UavTask

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECKPOINT = 3
EXIT_NUMERICAL = 4

_FIXED_DEFENSES = (DefenseMode.NONE, DefenseMode.VIRTUAL_JAMMER,
                   DefenseMode.HIGHER_THRESHOLD)
_PAD_JAMMERS = 4    # observation slots reserved for emitters
_PAD_NODES = 10     # observation slots reserved for nodes


# ---------------------------------------------------------------------------
# checkpoint plumbing


def _checkpoint_extra(run: RunConfig, kind: str,
                      defense: DefenseConfig) -> dict:
    resolved = resolved_dict(replace(run, defense=defense))
    return {
        "kind": kind,
        "defense": resolved["defense"],
        "j_pad": _PAD_JAMMERS,
        "n_pad": _PAD_NODES,
        "jammer_history_len": run.world.jammer_spec.history_len,
        "train": resolved["train"],
        "seed": run.seed,
    }


def _load_kind(path: Optional[str], kind: str, flag: str) -> tuple[QNetwork, dict]:
    if path is None:
        raise ConfigError(f"{flag} is required for this command")
    net, meta = load_checkpoint(path)
    extra = meta.get("extra", {})
    if extra.get("kind") != kind:
        raise CheckpointError(f"{path}: expected a {kind} checkpoint, got "
                              f"{extra.get('kind')!r}")
    return net, extra


def _defense_from_extra(extra: dict, path: str) -> DefenseConfig:
    try:
        box = extra["defense"]
        return DefenseConfig(
            mode=DefenseMode(box["mode"]),
            virtual_position=Vec2(*box["virtual_position"]),
            virtual_power=float(box["virtual_power"]),
            threshold_boost=float(box["threshold_boost"]),
            jammer_history_len=int(box["jammer_history_len"]),
            use_velocity_filter=bool(box["use_velocity_filter"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"{path}: invalid defense metadata ({err})") from err


def _check_uav_net(net: QNetwork, defense: DefenseConfig, run: RunConfig,
                   path: str, j_pad: int, n_pad: int) -> None:
    want_in = uav_feature_length(defense, j_pad, n_pad)
    if net.input_dim != want_in:
        raise CheckpointError(f"{path}: network input {net.input_dim} does not "
                              f"match feature length {want_in}")
    if net.action_count != run.world.action_count:
        raise CheckpointError(f"{path}: network has {net.action_count} actions, "
                              f"world offers {run.world.action_count}")


def _train_to_dir(task, run: RunConfig, out: str, checkpoint_name: str,
                  extra: dict) -> None:
    result = train(task, run.train, seed=run.seed)
    write_curve_csv(os.path.join(out, "curve.csv"), result.curve)
    ckpt_path = os.path.join(out, checkpoint_name)
    save_checkpoint(ckpt_path, result.net, extra)
    print(f"trained {len(result.curve)} episodes over {result.env_steps} env steps")
    print(f"checkpoint: {ckpt_path}")
    print(f"curve: {os.path.join(out, 'curve.csv')}")


# ---------------------------------------------------------------------------
# commands


def cmd_train_uav(run: RunConfig, out: str) -> int:
    if run.defense.mode not in _FIXED_DEFENSES:
        raise ConfigError("train-uav: defense.mode must be none, virtual_jammer,"
                          " or higher_threshold (jamming-aware retraining is"
                          " train-defense)")
    if run.world.jammer_spec.kind is JammerKind.INTELLIGENT:
        raise ConfigError("train-uav: world jammer cannot be intelligent"
                          " (train one with train-jammer)")
    task = UavTask(run.world, run.weights, run.defense,
                   j_pad=_PAD_JAMMERS, n_pad=_PAD_NODES)
    if run.defense.mode is DefenseMode.HIGHER_THRESHOLD:
        print(f"training sinr_threshold: {task.config.radio.sinr_threshold:g} "
              f"(evaluation threshold {run.world.radio.sinr_threshold:g} "
              f"+ boost {run.defense.threshold_boost:g})")
    elif run.defense.mode is DefenseMode.VIRTUAL_JAMMER:
        pos = run.defense.virtual_position
        print(f"virtual jammer during training: position ({pos.x:g}, {pos.y:g}),"
              f" power {run.defense.virtual_power:g} W")
    _train_to_dir(task, run, out, "uav_checkpoint.npz",
                  _checkpoint_extra(run, "uav", run.defense))
    return EXIT_OK


def cmd_train_jammer(run: RunConfig, out: str) -> int:
    if run.world.jammer_spec.kind is not JammerKind.INTELLIGENT:
        raise ConfigError("train-jammer: jammer.kind must be intelligent")
    net, extra = _load_kind(run.uav_checkpoint, "uav", "checkpoints.uav")
    defense = _defense_from_extra(extra, run.uav_checkpoint)
    j_pad = int(extra.get("j_pad", _PAD_JAMMERS))
    n_pad = int(extra.get("n_pad", _PAD_NODES))
    _check_uav_net(net, defense, run, run.uav_checkpoint, j_pad, n_pad)
    try:
        policy = FrozenUavPolicy(net, defense, j_pad=j_pad, n_pad=n_pad)
        task = JammerTask(run.world, policy, run.weights,
                          j_pad=_PAD_JAMMERS, n_pad=_PAD_NODES)
    except ValueError as err:
        raise CheckpointError(f"{run.uav_checkpoint}: {err}") from err
    print(f"attacking frozen policy from {run.uav_checkpoint} "
          f"(defense {defense.mode.value})")
    _train_to_dir(task, run, out, "jammer_checkpoint.npz",
                  _checkpoint_extra(run, "jammer", defense))
    return EXIT_OK


def cmd_train_defense(run: RunConfig, out: str,
                      assumption: Optional[int]) -> int:
    if run.defense.mode is not DefenseMode.INTELLIGENT:
        raise ConfigError("train-defense: defense.mode must be intelligent")
    if run.world.jammer_spec.kind is not JammerKind.INTELLIGENT:
        raise ConfigError("train-defense: jammer.kind must be intelligent")
    defense = run.defense
    if assumption is not None:
        defense = replace(defense, use_velocity_filter=(assumption == 2))
    jammer_net, _ = _load_kind(run.jammer_checkpoint, "jammer",
                               "checkpoints.jammer")
    try:
        task = UavTask(run.world, run.weights, defense, jammer_net=jammer_net,
                       j_pad=_PAD_JAMMERS, n_pad=_PAD_NODES)
    except ValueError as err:
        raise CheckpointError(f"{run.jammer_checkpoint}: {err}") from err
    mode = ("sensing-limited with velocity filter" if defense.use_velocity_filter
            else "jammer position fully observed")
    print(f"retraining against frozen jammer from {run.jammer_checkpoint} "
          f"({mode}; mission deadline {run.world.mission_deadline:g} s)")
    _train_to_dir(task, run, out, "defense_checkpoint.npz",
                  _checkpoint_extra(run, "uav", defense))
    return EXIT_OK


def cmd_eval(run: RunConfig, out: str, episodes: int, export_traj: bool,
             workers: int) -> int:
    if episodes < 1:
        raise ConfigError("eval: --episodes must be >= 1")
    if workers < 1:
        raise ConfigError("eval: --workers must be >= 1")
    net, extra = _load_kind(run.uav_checkpoint, "uav", "checkpoints.uav")
    defense = _defense_from_extra(extra, run.uav_checkpoint)
    if defense.mode in (DefenseMode.VIRTUAL_JAMMER,
                        DefenseMode.HIGHER_THRESHOLD):
        # Virtual emitters and threshold boosts shape the training world
        # only; deployment runs the plain world (same feature layout).
        defense = DefenseConfig()
    j_pad = int(extra.get("j_pad", _PAD_JAMMERS))
    n_pad = int(extra.get("n_pad", _PAD_NODES))
    _check_uav_net(net, defense, run, run.uav_checkpoint, j_pad, n_pad)
    jammer_net = None
    if run.world.jammer_spec.kind is JammerKind.INTELLIGENT:
        if run.jammer_checkpoint is None:
            raise ConfigError("eval: checkpoints.jammer is required when "
                              "jammer.kind is intelligent")
        jammer_net, _ = _load_kind(run.jammer_checkpoint, "jammer",
                                   "checkpoints.jammer")

    def factory() -> UavTask:
        return UavTask(run.world, run.weights, defense, jammer_net=jammer_net,
                       j_pad=j_pad, n_pad=n_pad,
                       collect_trajectory=export_traj)

    try:
        factory()  # surface dimension mismatches before any rollout
    except ValueError as err:
        raise CheckpointError(f"{run.jammer_checkpoint}: {err}") from err

    results = greedy_evaluate(net, factory, episodes, seed=run.seed,
                              workers=workers)
    summary = world.aggregate([ep.info["record"] for ep in results])
    metrics_path = os.path.join(out, "metrics.json")
    world.write_metrics_json(metrics_path, summary)
    if export_traj:
        for ep in results:
            world.write_trajectory_csv(
                os.path.join(out, f"traj_ep{ep.index:04d}.csv"),
                ep.info["trajectory"])
        print(f"trajectories: {episodes} CSV files in {out}")
    print(f"metrics: {metrics_path}")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_region(run: RunConfig, out: str, resolution: float, at: float) -> int:
    spec = run.world.jammer_spec
    if spec.kind is JammerKind.INTELLIGENT:
        raise ConfigError("region: jammer.kind must be none, continuous, or "
                          "periodic (a mobile jammer has no fixed emission "
                          "point)")
    if resolution <= 0.0:
        raise ConfigError("region: --resolution must be > 0")
    if at < 0.0:
        raise ConfigError("region: --at must be >= 0")
    state = world.reset(run.world, run.seed)
    scene = RegionScene(
        node_positions=tuple(n.position for n in state.nodes),
        node_tx_powers=tuple(n.tx_power for n in state.nodes),
        node_active=tuple(True for _ in state.nodes),
        uav_altitude=run.world.typical_altitude,
        params=run.world.radio,
        jammer_position=spec.position,
        jammer_power=emission(spec, at),
        jammer_altitude=spec.altitude,
    )
    arena = run.world.arena
    xs, ys, grid = reliable_region(scene, arena.x_range, arena.y_range,
                                   resolution)
    region_path = os.path.join(out, "region.csv")
    write_region_csv(region_path, xs, ys, grid)
    print(f"region: {int(grid.sum())} of {grid.size} cells reliable at "
          f"t={at:g} s (resolution {resolution:g} m)")
    print(f"grid: {region_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavjam",
        description="Train and evaluate aerial data-collection policies "
                    "under jamming attacks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's top-level seed")
        p.add_argument("--out", default=None,
                       help="override the config's output directory")

    p = sub.add_parser("train-uav",
                       help="train the collector (none/virtual_jammer/"
                            "higher_threshold defenses)")
    common(p)

    p = sub.add_parser("train-jammer",
                       help="train a mobile jammer against a frozen collector "
                            "policy")
    common(p)

    p = sub.add_parser("train-defense",
                       help="retrain the collector with jammer-aware features "
                            "against a frozen jammer")
    common(p)
    p.add_argument("--assumption", type=int, choices=(1, 2), default=None,
                   help="1: jammer position always observed; 2: sensing-"
                        "limited with velocity-filter estimation")

    p = sub.add_parser("eval", help="greedy evaluation of a trained collector")
    common(p)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--export-traj", action="store_true",
                   help="write one trajectory CSV per episode")
    p.add_argument("--workers", type=int, default=1,
                   help="evaluation worker threads (default 1, "
                        "bit-reproducible)")

    p = sub.add_parser("region",
                       help="reliable-transmission-region grid for the "
                            "configured scene")
    common(p)
    p.add_argument("--resolution", type=float, default=1.0,
                   help="grid cell size in metres")
    p.add_argument("--at", type=float, default=0.0,
                   help="episode time in seconds at which to sample the "
                        "jammer's emission")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        role = "jammer" if args.command == "train-jammer" else "uav"
        run = with_overrides(load_config(args.config, role=role),
                             seed=args.seed, out=args.out)
        out = run.output_dir
        os.makedirs(out, exist_ok=True)
        echo = dump_yaml(run)
        with open(os.path.join(out, "resolved_config.yaml"), "w",
                  encoding="utf-8") as fh:
            fh.write(echo)
        sys.stdout.write(echo)
        if args.command == "train-uav":
            return cmd_train_uav(run, out)
        if args.command == "train-jammer":
            return cmd_train_jammer(run, out)
        if args.command == "train-defense":
            return cmd_train_defense(run, out, args.assumption)
        if args.command == "eval":
            return cmd_eval(run, out, args.episodes, args.export_traj,
                            args.workers)
        return cmd_region(run, out, args.resolution, args.at)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckpointError as err:
        print(f"checkpoint error: {err}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
