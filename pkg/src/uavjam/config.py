"""Strict structured-config loading for the command-line tools.

A run is described by one YAML document whose nested sections mirror the
runtime dataclasses::

    seed: 7
    output_dir: runs/demo
    world:
      arena: {x_range: [-50, 50], y_range: [-50, 50]}
      node_count_range: [5, 10]
      ...
    jammer:          # becomes the world's jammer spec
      kind: continuous
      position: [0, 0]
      tx_power: 3.333e-4
    defense:
      mode: virtual_jammer
      ...
    weights:  {a1: 0.05, ...}
    train:    {variant: d3qn, ...}
    checkpoints: {uav: runs/uav.npz, jammer: runs/jammer.npz}

Every key is validated: unknown keys anywhere raise :class:`ConfigError`
naming the dotted path (catching hyperparameter typos), as do values of the
wrong shape or range.  :func:`resolved_dict` materializes every default so a
finished run can echo exactly the configuration it used; a run is
reproducible from the echo alone.

Convenience default: when ``train.max_env_steps`` is set but
``train.epsilon_decay_steps`` is not, exploration decays over half the step
budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional

import yaml

from .agent import DefenseConfig, DefenseMode, RewardWeights
from .jammers import JammerKind, JammerSpec
from .learner import TrainConfig
from .motion import Arena, KinematicLimits, Rect, Vec2
from .radio import RadioParams
from .world import WorldConfig

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config",
           "resolved_dict", "dump_yaml"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending dotted path."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one command-line run needs, fully validated."""

    world: WorldConfig
    defense: DefenseConfig = DefenseConfig()
    weights: RewardWeights = RewardWeights()
    train: TrainConfig = TrainConfig()
    seed: int = 0
    output_dir: str = "runs"
    uav_checkpoint: Optional[str] = None
    jammer_checkpoint: Optional[str] = None


# ---------------------------------------------------------------------------
# scalar coercions


def _mapping(value: Any, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    for key in value:
        if not isinstance(key, str):
            raise ConfigError(f"{path}: non-string key {key!r}")
    return value


def _check_keys(mapping: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key (expected one of "
                              f"{', '.join(sorted(allowed))})")


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


def _float_list(value: Any, path: str, length: int) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise ConfigError(f"{path}: expected a list of {length} numbers")
    return [_as_float(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _float_pair(value: Any, path: str) -> tuple[float, float]:
    lo, hi = _float_list(value, path, 2)
    return (lo, hi)


def _int_pair(value: Any, path: str) -> tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{path}: expected a list of 2 integers")
    return (_as_int(value[0], f"{path}[0]"), _as_int(value[1], f"{path}[1]"))


def _int_tuple(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of integers")
    return tuple(_as_int(v, f"{path}[{i}]") for i, v in enumerate(value))


def _vec2(value: Any, path: str) -> Vec2:
    x, y = _float_list(value, path, 2)
    return Vec2(x, y)


def _rect(value: Any, path: str) -> Rect:
    x0, x1, y0, y1 = _float_list(value, path, 4)
    try:
        return Rect(x0, x1, y0, y1)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _limits(value: Any, path: str) -> KinematicLimits:
    box = _mapping(value, path)
    _check_keys(box, ("v_max", "max_turn_rate"), path)
    try:
        return KinematicLimits(
            v_max=_as_float(box.get("v_max", 2.0), f"{path}.v_max"),
            max_turn_rate=_as_float(box.get("max_turn_rate", math.pi / 3),
                                    f"{path}.max_turn_rate"),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _enum(cls: type[Enum], value: Any, path: str) -> Enum:
    name = _as_str(value, path)
    try:
        return cls(name)
    except ValueError:
        choices = ", ".join(member.value for member in cls)
        raise ConfigError(f"{path}: {name!r} is not one of: {choices}") from None


def _pick(box: dict, key: str, parse, default):
    """Parse box[key] with `parse`, or return the dataclass default."""
    if key not in box or box[key] is None:
        return default
    return parse(box[key])


# ---------------------------------------------------------------------------
# section builders


def _build_arena(value: Any, path: str) -> Arena:
    box = _mapping(value, path)
    _check_keys(box, ("x_range", "y_range", "no_fly_zones", "sensing_radius"), path)
    if "x_range" not in box or "y_range" not in box:
        raise ConfigError(f"{path}: x_range and y_range are required")
    zones_raw = box.get("no_fly_zones") or []
    if not isinstance(zones_raw, (list, tuple)):
        raise ConfigError(f"{path}.no_fly_zones: expected a list of rectangles")
    zones = tuple(_rect(z, f"{path}.no_fly_zones[{i}]")
                  for i, z in enumerate(zones_raw))
    try:
        return Arena(
            x_range=_float_pair(box["x_range"], f"{path}.x_range"),
            y_range=_float_pair(box["y_range"], f"{path}.y_range"),
            no_fly_zones=zones,
            sensing_radius=_as_float(box.get("sensing_radius", 15.0),
                                     f"{path}.sensing_radius"),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_radio(value: Any, path: str) -> RadioParams:
    box = _mapping(value, path)
    _check_keys(box, ("path_loss_exponent", "noise_power", "sinr_threshold"), path)
    base = RadioParams()
    try:
        return RadioParams(
            path_loss_exponent=_pick(box, "path_loss_exponent",
                                     lambda v: _as_float(v, f"{path}.path_loss_exponent"),
                                     base.path_loss_exponent),
            noise_power=_pick(box, "noise_power",
                              lambda v: _as_float(v, f"{path}.noise_power"),
                              base.noise_power),
            sinr_threshold=_pick(box, "sinr_threshold",
                                 lambda v: _as_float(v, f"{path}.sinr_threshold"),
                                 base.sinr_threshold),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_jammer(value: Any, path: str) -> JammerSpec:
    box = _mapping(value, path)
    _check_keys(box, ("kind", "position", "destination", "altitude", "tx_power",
                      "period_on", "period_total", "limits", "deadline",
                      "history_len", "radius", "sinr_floor"), path)
    base = JammerSpec()
    try:
        return JammerSpec(
            kind=_pick(box, "kind",
                       lambda v: _enum(JammerKind, v, f"{path}.kind"), base.kind),
            position=_pick(box, "position",
                           lambda v: _vec2(v, f"{path}.position"), None),
            destination=_pick(box, "destination",
                              lambda v: _vec2(v, f"{path}.destination"), None),
            altitude=_pick(box, "altitude",
                           lambda v: _as_float(v, f"{path}.altitude"), base.altitude),
            tx_power=_pick(box, "tx_power",
                           lambda v: _as_float(v, f"{path}.tx_power"), base.tx_power),
            period_on=_pick(box, "period_on",
                            lambda v: _as_float(v, f"{path}.period_on"), base.period_on),
            period_total=_pick(box, "period_total",
                               lambda v: _as_float(v, f"{path}.period_total"),
                               base.period_total),
            limits=_pick(box, "limits",
                         lambda v: _limits(v, f"{path}.limits"), None),
            deadline=_pick(box, "deadline",
                           lambda v: _as_float(v, f"{path}.deadline"), None),
            history_len=_pick(box, "history_len",
                              lambda v: _as_int(v, f"{path}.history_len"),
                              base.history_len),
            radius=_pick(box, "radius",
                         lambda v: _as_float(v, f"{path}.radius"), base.radius),
            sinr_floor=_pick(box, "sinr_floor",
                             lambda v: _as_float(v, f"{path}.sinr_floor"),
                             base.sinr_floor),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_world(value: Any, jammer: JammerSpec, path: str) -> WorldConfig:
    box = _mapping(value, path)
    _check_keys(box, ("arena", "node_count_range", "node_tx_power", "initial_data",
                      "typical_limits", "typical_altitude", "typical_radius",
                      "other_uav_count", "other_radius", "mission_deadline",
                      "radio", "dt", "k_speeds", "m_headings",
                      "departure_area", "landing_area", "arrival_tolerance"), path)
    if "arena" not in box:
        raise ConfigError(f"{path}.arena: required")
    base_limits = KinematicLimits(2.0, math.pi / 3)
    try:
        return WorldConfig(
            arena=_build_arena(box["arena"], f"{path}.arena"),
            node_count_range=_pick(box, "node_count_range",
                                   lambda v: _int_pair(v, f"{path}.node_count_range"),
                                   (5, 10)),
            node_tx_power=_pick(box, "node_tx_power",
                                lambda v: _as_float(v, f"{path}.node_tx_power"), 1e-2),
            initial_data=_pick(box, "initial_data",
                               lambda v: _as_float(v, f"{path}.initial_data"), 200.0),
            typical_limits=_pick(box, "typical_limits",
                                 lambda v: _limits(v, f"{path}.typical_limits"),
                                 base_limits),
            typical_altitude=_pick(box, "typical_altitude",
                                   lambda v: _as_float(v, f"{path}.typical_altitude"),
                                   50.0),
            typical_radius=_pick(box, "typical_radius",
                                 lambda v: _as_float(v, f"{path}.typical_radius"), 0.5),
            other_uav_count=_pick(box, "other_uav_count",
                                  lambda v: _as_int(v, f"{path}.other_uav_count"), 2),
            other_radius=_pick(box, "other_radius",
                               lambda v: _as_float(v, f"{path}.other_radius"), 0.5),
            mission_deadline=_pick(box, "mission_deadline",
                                   lambda v: _as_float(v, f"{path}.mission_deadline"),
                                   100.0),
            radio=_build_radio(box.get("radio"), f"{path}.radio"),
            jammer_spec=jammer,
            dt=_pick(box, "dt", lambda v: _as_float(v, f"{path}.dt"), 1.0),
            k_speeds=_pick(box, "k_speeds",
                           lambda v: _as_int(v, f"{path}.k_speeds"), 3),
            m_headings=_pick(box, "m_headings",
                             lambda v: _as_int(v, f"{path}.m_headings"), 7),
            departure_area=_pick(box, "departure_area",
                                 lambda v: _rect(v, f"{path}.departure_area"), None),
            landing_area=_pick(box, "landing_area",
                               lambda v: _rect(v, f"{path}.landing_area"), None),
            arrival_tolerance=_pick(box, "arrival_tolerance",
                                    lambda v: _as_float(v, f"{path}.arrival_tolerance"),
                                    None),
        )
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_defense(value: Any, path: str) -> DefenseConfig:
    box = _mapping(value, path)
    _check_keys(box, ("mode", "virtual_position", "virtual_power",
                      "threshold_boost", "jammer_history_len",
                      "use_velocity_filter"), path)
    base = DefenseConfig()
    try:
        return DefenseConfig(
            mode=_pick(box, "mode",
                       lambda v: _enum(DefenseMode, v, f"{path}.mode"), base.mode),
            virtual_position=_pick(box, "virtual_position",
                                   lambda v: _vec2(v, f"{path}.virtual_position"),
                                   base.virtual_position),
            virtual_power=_pick(box, "virtual_power",
                                lambda v: _as_float(v, f"{path}.virtual_power"),
                                base.virtual_power),
            threshold_boost=_pick(box, "threshold_boost",
                                  lambda v: _as_float(v, f"{path}.threshold_boost"),
                                  base.threshold_boost),
            jammer_history_len=_pick(box, "jammer_history_len",
                                     lambda v: _as_int(v, f"{path}.jammer_history_len"),
                                     base.jammer_history_len),
            use_velocity_filter=_pick(box, "use_velocity_filter",
                                      lambda v: _as_bool(v, f"{path}.use_velocity_filter"),
                                      base.use_velocity_filter),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_weights(value: Any, path: str) -> RewardWeights:
    box = _mapping(value, path)
    names = ("a1", "a2", "a3", "a4", "a5", "a6", "a7", "d_buffer", "d_buffer2")
    _check_keys(box, names, path)
    base = RewardWeights()
    kwargs = {name: _pick(box, name,
                          lambda v, n=name: _as_float(v, f"{path}.{n}"),
                          getattr(base, name))
              for name in names}
    try:
        return RewardWeights(**kwargs)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


_JAMMER_HIDDEN = (256, 128)


def _build_train(value: Any, path: str, role: str) -> TrainConfig:
    box = _mapping(value, path)
    _check_keys(box, ("variant", "hidden", "gamma", "lr", "batch_size", "l2_reg",
                      "epsilon_start", "epsilon_end", "epsilon_decay_steps",
                      "replay_capacity", "target_sync_every", "total_episodes",
                      "max_env_steps", "bn_momentum"), path)
    base = TrainConfig()
    if role == "jammer":
        base = replace(base, hidden=_JAMMER_HIDDEN)
    max_env_steps = _pick(box, "max_env_steps",
                          lambda v: _as_int(v, f"{path}.max_env_steps"), None)
    decay_default = base.epsilon_decay_steps
    if max_env_steps is not None and "epsilon_decay_steps" not in box:
        decay_default = max(1, max_env_steps // 2)
    try:
        return TrainConfig(
            variant=_pick(box, "variant",
                          lambda v: _as_str(v, f"{path}.variant"), base.variant),
            hidden=_pick(box, "hidden",
                         lambda v: _int_tuple(v, f"{path}.hidden"), base.hidden),
            gamma=_pick(box, "gamma",
                        lambda v: _as_float(v, f"{path}.gamma"), base.gamma),
            lr=_pick(box, "lr", lambda v: _as_float(v, f"{path}.lr"), base.lr),
            batch_size=_pick(box, "batch_size",
                             lambda v: _as_int(v, f"{path}.batch_size"),
                             base.batch_size),
            l2_reg=_pick(box, "l2_reg",
                         lambda v: _as_float(v, f"{path}.l2_reg"), base.l2_reg),
            epsilon_start=_pick(box, "epsilon_start",
                                lambda v: _as_float(v, f"{path}.epsilon_start"),
                                base.epsilon_start),
            epsilon_end=_pick(box, "epsilon_end",
                              lambda v: _as_float(v, f"{path}.epsilon_end"),
                              base.epsilon_end),
            epsilon_decay_steps=_pick(box, "epsilon_decay_steps",
                                      lambda v: _as_int(v, f"{path}.epsilon_decay_steps"),
                                      decay_default),
            replay_capacity=_pick(box, "replay_capacity",
                                  lambda v: _as_int(v, f"{path}.replay_capacity"),
                                  base.replay_capacity),
            target_sync_every=_pick(box, "target_sync_every",
                                    lambda v: _as_int(v, f"{path}.target_sync_every"),
                                    base.target_sync_every),
            total_episodes=_pick(box, "total_episodes",
                                 lambda v: _as_int(v, f"{path}.total_episodes"),
                                 base.total_episodes),
            max_env_steps=max_env_steps,
            bn_momentum=_pick(box, "bn_momentum",
                              lambda v: _as_float(v, f"{path}.bn_momentum"),
                              base.bn_momentum),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _build_checkpoints(value: Any, path: str) -> tuple[Optional[str], Optional[str]]:
    box = _mapping(value, path)
    _check_keys(box, ("uav", "jammer"), path)
    uav = _pick(box, "uav", lambda v: _as_str(v, f"{path}.uav"), None)
    jammer = _pick(box, "jammer", lambda v: _as_str(v, f"{path}.jammer"), None)
    return uav, jammer


# ---------------------------------------------------------------------------
# entry points


def parse_config(doc: Any, source: str = "config", role: str = "uav") -> RunConfig:
    """Validate a parsed YAML document into a :class:`RunConfig`.

    `role` selects which trunk the training section defaults to when
    ``train.hidden`` is omitted: the collector's (256, 256, 128) or the
    jammer's (256, 128).
    """
    if role not in ("uav", "jammer"):
        raise ValueError("role must be 'uav' or 'jammer'")
    box = _mapping(doc, source)
    _check_keys(box, ("seed", "output_dir", "world", "jammer", "defense",
                      "weights", "train", "checkpoints"), source)
    if "world" not in box:
        raise ConfigError(f"{source}.world: required")
    jammer = _build_jammer(box.get("jammer"), f"{source}.jammer")
    world = _build_world(box["world"], jammer, f"{source}.world")
    uav_ckpt, jammer_ckpt = _build_checkpoints(box.get("checkpoints"),
                                               f"{source}.checkpoints")
    return RunConfig(
        world=world,
        defense=_build_defense(box.get("defense"), f"{source}.defense"),
        weights=_build_weights(box.get("weights"), f"{source}.weights"),
        train=_build_train(box.get("train"), f"{source}.train", role),
        seed=_pick(box, "seed", lambda v: _as_int(v, f"{source}.seed"), 0),
        output_dir=_pick(box, "output_dir",
                         lambda v: _as_str(v, f"{source}.output_dir"), "runs"),
        uav_checkpoint=uav_ckpt,
        jammer_checkpoint=jammer_ckpt,
    )


def load_config(path: str, role: str = "uav") -> RunConfig:
    """Read and validate a YAML run configuration from `path`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse config {path}: {err}") from err
    return parse_config(doc, source=path, role=role)


def with_overrides(run: RunConfig, seed: Optional[int] = None,
                   out: Optional[str] = None) -> RunConfig:
    """Apply command-line overrides on top of a loaded config."""
    if seed is not None:
        run = replace(run, seed=seed)
    if out is not None:
        run = replace(run, output_dir=out)
    return run


def _rect_list(rect: Optional[Rect]) -> Optional[list[float]]:
    if rect is None:
        return None
    return [rect.x_min, rect.x_max, rect.y_min, rect.y_max]


def _vec_list(vec: Optional[Vec2]) -> Optional[list[float]]:
    if vec is None:
        return None
    return [vec.x, vec.y]


def resolved_dict(run: RunConfig) -> dict:
    """Plain-data view of the config with every default materialized.

    Departure/landing strips and the arrival tolerance are echoed at their
    effective values even when the input left them implicit.
    """
    world = run.world
    spec = world.jammer_spec
    limits = spec.limits
    return {
        "seed": run.seed,
        "output_dir": run.output_dir,
        "world": {
            "arena": {
                "x_range": list(world.arena.x_range),
                "y_range": list(world.arena.y_range),
                "no_fly_zones": [_rect_list(z) for z in world.arena.no_fly_zones],
                "sensing_radius": world.arena.sensing_radius,
            },
            "node_count_range": list(world.node_count_range),
            "node_tx_power": world.node_tx_power,
            "initial_data": world.initial_data,
            "typical_limits": {"v_max": world.typical_limits.v_max,
                               "max_turn_rate": world.typical_limits.max_turn_rate},
            "typical_altitude": world.typical_altitude,
            "typical_radius": world.typical_radius,
            "other_uav_count": world.other_uav_count,
            "other_radius": world.other_radius,
            "mission_deadline": world.mission_deadline,
            "radio": {"path_loss_exponent": world.radio.path_loss_exponent,
                      "noise_power": world.radio.noise_power,
                      "sinr_threshold": world.radio.sinr_threshold},
            "dt": world.dt,
            "k_speeds": world.k_speeds,
            "m_headings": world.m_headings,
            "departure_area": _rect_list(world.departure()),
            "landing_area": _rect_list(world.landing()),
            "arrival_tolerance": world.tolerance(),
        },
        "jammer": {
            "kind": spec.kind.value,
            "position": _vec_list(spec.position),
            "destination": _vec_list(spec.destination),
            "altitude": spec.altitude,
            "tx_power": spec.tx_power,
            "period_on": spec.period_on,
            "period_total": spec.period_total,
            "limits": (None if limits is None else
                       {"v_max": limits.v_max, "max_turn_rate": limits.max_turn_rate}),
            "deadline": spec.deadline,
            "history_len": spec.history_len,
            "radius": spec.radius,
            "sinr_floor": spec.sinr_floor,
        },
        "defense": {
            "mode": run.defense.mode.value,
            "virtual_position": _vec_list(run.defense.virtual_position),
            "virtual_power": run.defense.virtual_power,
            "threshold_boost": run.defense.threshold_boost,
            "jammer_history_len": run.defense.jammer_history_len,
            "use_velocity_filter": run.defense.use_velocity_filter,
        },
        "weights": {name: getattr(run.weights, name)
                    for name in ("a1", "a2", "a3", "a4", "a5", "a6", "a7",
                                 "d_buffer", "d_buffer2")},
        "train": {
            "variant": run.train.variant,
            "hidden": list(run.train.hidden),
            "gamma": run.train.gamma,
            "lr": run.train.lr,
            "batch_size": run.train.batch_size,
            "l2_reg": run.train.l2_reg,
            "epsilon_start": run.train.epsilon_start,
            "epsilon_end": run.train.epsilon_end,
            "epsilon_decay_steps": run.train.epsilon_decay_steps,
            "replay_capacity": run.train.replay_capacity,
            "target_sync_every": run.train.target_sync_every,
            "total_episodes": run.train.total_episodes,
            "max_env_steps": run.train.max_env_steps,
            "bn_momentum": run.train.bn_momentum,
        },
        "checkpoints": {"uav": run.uav_checkpoint, "jammer": run.jammer_checkpoint},
    }


def dump_yaml(run: RunConfig) -> str:
    """Fully-resolved config as a YAML string (round-trips through the loader)."""
    return yaml.safe_dump(resolved_dict(run), sort_keys=False)
