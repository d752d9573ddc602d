"""Strict config loading: defaults, typo rejection, round-trips."""

import math

import pytest
import yaml

from uavjam.agent import DefenseMode
from uavjam.config import (
    ConfigError,
    dump_yaml,
    load_config,
    parse_config,
    resolved_dict,
    with_overrides,
)
from uavjam.jammers import JammerKind
from uavjam.motion import Rect, Vec2


def minimal_doc(**extra):
    doc = {"world": {"arena": {"x_range": [-20, 20], "y_range": [-20, 20]}}}
    doc.update(extra)
    return doc


class TestDefaults:
    def test_minimal_config_materializes_defaults(self):
        run = parse_config(minimal_doc())
        assert run.seed == 0
        assert run.output_dir == "runs"
        assert run.world.node_tx_power == pytest.approx(1e-2)
        assert run.world.mission_deadline == 100.0
        assert run.world.jammer_spec.kind is JammerKind.NONE
        assert run.defense.mode is DefenseMode.NONE
        assert run.train.gamma == 0.95
        assert run.train.hidden == (256, 256, 128)
        assert run.train.target_sync_every == 1000
        assert run.uav_checkpoint is None

    def test_jammer_role_defaults_to_smaller_trunk(self):
        run = parse_config(minimal_doc(), role="jammer")
        assert run.train.hidden == (256, 128)
        explicit = parse_config(
            minimal_doc(train={"hidden": [32, 32, 32]}), role="jammer")
        assert explicit.train.hidden == (32, 32, 32)

    def test_epsilon_decay_defaults_to_half_step_budget(self):
        run = parse_config(minimal_doc(train={"max_env_steps": 3000}))
        assert run.train.epsilon_decay_steps == 1500
        pinned = parse_config(minimal_doc(
            train={"max_env_steps": 3000, "epsilon_decay_steps": 99}))
        assert pinned.train.epsilon_decay_steps == 99

    def test_departure_landing_tolerance_resolved_in_echo(self):
        echo = resolved_dict(parse_config(minimal_doc()))
        assert echo["world"]["departure_area"] == [-20.0, -16.0, -20.0, 20.0]
        assert echo["world"]["landing_area"] == [16.0, 20.0, -20.0, 20.0]
        assert echo["world"]["arrival_tolerance"] == pytest.approx(2.0)

    def test_nested_sections_parse(self):
        run = parse_config(minimal_doc(
            jammer={"kind": "continuous", "position": [3, -4],
                    "tx_power": 1e-3},
            defense={"mode": "virtual_jammer", "virtual_position": [1, 2]},
            weights={"a5": 30.0},
            checkpoints={"uav": "a.npz", "jammer": "b.npz"},
            seed=9, output_dir="out"))
        assert run.world.jammer_spec.position == Vec2(3.0, -4.0)
        assert run.defense.virtual_position == Vec2(1.0, 2.0)
        assert run.weights.a5 == 30.0
        assert run.weights.a1 == 0.05
        assert (run.uav_checkpoint, run.jammer_checkpoint) == ("a.npz", "b.npz")
        assert (run.seed, run.output_dir) == (9, "out")

    def test_no_fly_zones_and_areas(self):
        run = parse_config(minimal_doc(world={
            "arena": {"x_range": [-20, 20], "y_range": [-20, 20],
                      "no_fly_zones": [[0, 5, 0, 5]]},
            "departure_area": [-18, -15, -10, 10],
        }))
        assert run.world.arena.no_fly_zones == (Rect(0, 5, 0, 5),)
        assert run.world.departure() == Rect(-18, -15, -10, 10)


class TestRejection:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="wrold"):
            parse_config({"wrold": {}, **minimal_doc()})

    def test_unknown_train_key_names_dotted_path(self):
        with pytest.raises(ConfigError, match=r"train\.batchsize"):
            parse_config(minimal_doc(train={"batchsize": 32}))

    def test_unknown_nested_arena_key(self):
        with pytest.raises(ConfigError, match=r"world\.arena\.xrange"):
            parse_config({"world": {"arena": {
                "xrange": [0, 1], "x_range": [0, 1], "y_range": [0, 1]}}})

    def test_missing_world(self):
        with pytest.raises(ConfigError, match="world"):
            parse_config({"seed": 1})
        with pytest.raises(ConfigError, match="world"):
            parse_config(None)

    def test_wrong_shapes(self):
        with pytest.raises(ConfigError, match=r"x_range"):
            parse_config({"world": {"arena": {"x_range": 7,
                                              "y_range": [0, 1]}}})
        with pytest.raises(ConfigError, match=r"weights\.a1"):
            parse_config(minimal_doc(weights={"a1": "lots"}))
        with pytest.raises(ConfigError, match=r"train\.batch_size"):
            parse_config(minimal_doc(train={"batch_size": 2.5}))

    def test_bad_enum_lists_choices(self):
        with pytest.raises(ConfigError, match="continuous"):
            parse_config(minimal_doc(jammer={"kind": "sometimes"}))
        with pytest.raises(ConfigError, match=r"defense\.mode"):
            parse_config(minimal_doc(defense={"mode": "wishful"}))

    def test_domain_validation_carries_section_path(self):
        with pytest.raises(ConfigError, match="train"):
            parse_config(minimal_doc(train={"gamma": 1.5}))
        with pytest.raises(ConfigError, match="world"):
            parse_config(minimal_doc(world={
                "arena": {"x_range": [-20, 20], "y_range": [-20, 20]},
                "dt": -1.0}))
        with pytest.raises(ConfigError, match="jammer"):
            parse_config(minimal_doc(jammer={"kind": "intelligent",
                                             "tx_power": 1e-3}))

    def test_bool_is_not_a_number(self):
        with pytest.raises(ConfigError, match=r"world\.dt"):
            parse_config(minimal_doc(world={
                "arena": {"x_range": [-20, 20], "y_range": [-20, 20]},
                "dt": True}))


class TestRoundTrip:
    def test_echo_reloads_to_same_resolved_view(self):
        # The echo materializes implicit defaults (departure strip etc.), so
        # reloading it is a fixed point of the resolved view.
        run = parse_config(minimal_doc(
            jammer={"kind": "periodic", "position": [0, 0], "tx_power": 5e-4,
                    "period_on": 40, "period_total": 60},
            defense={"mode": "higher_threshold"},
            train={"hidden": [16, 8], "max_env_steps": 500},
            seed=3))
        again = parse_config(yaml.safe_load(dump_yaml(run)))
        assert resolved_dict(again) == resolved_dict(run)
        assert (again.train, again.defense, again.weights) == \
               (run.train, run.defense, run.weights)
        assert again.world.jammer_spec == run.world.jammer_spec
        assert again.world.departure() == run.world.departure()
        assert again.world.landing() == run.world.landing()
        assert again.world.tolerance() == run.world.tolerance()

    def test_intelligent_jammer_round_trip(self):
        run = parse_config(minimal_doc(
            jammer={"kind": "intelligent", "tx_power": 1e-4, "altitude": 60,
                    "limits": {"v_max": 1.5, "max_turn_rate": math.pi / 3},
                    "destination": [10, 10], "deadline": 80},
            defense={"mode": "intelligent", "use_velocity_filter": True}))
        again = parse_config(yaml.safe_load(dump_yaml(run)))
        assert resolved_dict(again) == resolved_dict(run)
        assert again.world.jammer_spec.limits.v_max == 1.5

    def test_overrides(self):
        run = parse_config(minimal_doc())
        bumped = with_overrides(run, seed=42, out="elsewhere")
        assert (bumped.seed, bumped.output_dir) == (42, "elsewhere")
        untouched = with_overrides(run)
        assert untouched == run


class TestFiles:
    def test_load_config_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(minimal_doc(seed=11)))
        assert load_config(str(path)).seed == 11

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "nope.yaml"))

    def test_garbage_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("world: [unclosed")
        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(str(path))
