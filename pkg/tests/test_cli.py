"""End-to-end command-line flows at tiny scale: exit codes, artifacts, echoes."""

import csv
import json
import math
import subprocess
import sys

import pytest
import yaml

from uavjam.cli import main
from uavjam.learner import load_checkpoint
from uavjam.world import TRAJECTORY_COLUMNS


def world_section(**over):
    base = {
        "arena": {"x_range": [-20, 20], "y_range": [-20, 20]},
        "node_count_range": [2, 2],
        "node_tx_power": 2.0e-3,
        "initial_data": 8.0,
        "other_uav_count": 0,
        "mission_deadline": 40.0,
        "departure_area": [-16, -12, -12, 12],
        "landing_area": [12, 16, -12, 12],
    }
    base.update(over)
    return base


TINY_TRAIN = {"hidden": [8, 8], "batch_size": 8, "epsilon_decay_steps": 100,
              "replay_capacity": 400, "target_sync_every": 50,
              "total_episodes": 3}
CONT_JAMMER = {"kind": "continuous", "position": [0, 0], "tx_power": 3.333e-4}
INTEL_JAMMER = {"kind": "intelligent", "altitude": 60.0, "tx_power": 3.333e-4,
                "limits": {"v_max": 1.5, "max_turn_rate": math.pi / 3},
                "deadline": 40.0, "history_len": 2}


def write_config(directory, out_dir, name="run.yaml", **sections):
    doc = {"seed": 5, "output_dir": str(out_dir),
           "world": world_section(), "train": dict(TINY_TRAIN)}
    doc.update(sections)
    path = directory / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def read_region(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {(r["x"], r["y"]): int(r["reliable"]) for r in rows}


@pytest.fixture(scope="module")
def trained_uav(tmp_path_factory):
    """A tiny trained collector checkpoint shared across CLI tests."""
    out = tmp_path_factory.mktemp("uav_run")
    cfg = write_config(out, out / "art")
    assert main(["train-uav", "--config", cfg]) == 0
    return out / "art" / "uav_checkpoint.npz"


@pytest.fixture(scope="module")
def trained_jammer(tmp_path_factory, trained_uav):
    """A tiny trained jammer checkpoint attacking the fixture collector."""
    out = tmp_path_factory.mktemp("jammer_run")
    cfg = write_config(out, out / "art", jammer=dict(INTEL_JAMMER),
                       checkpoints={"uav": str(trained_uav)})
    assert main(["train-jammer", "--config", cfg]) == 0
    return out / "art" / "jammer_checkpoint.npz"


class TestTrainUav:
    def test_fifty_episode_smoke_run(self, tmp_path, capsys):
        train = dict(TINY_TRAIN, total_episodes=50)
        cfg = write_config(tmp_path, tmp_path / "art", train=train)
        assert main(["train-uav", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "trained 50 episodes" in out
        art = tmp_path / "art"
        assert (art / "uav_checkpoint.npz").exists()
        assert (art / "resolved_config.yaml").exists()
        with open(art / "curve.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 50
        assert list(rows[0]) == ["episode", "steps", "return", "epsilon",
                                 "loss_mean"]
        # echo reloads to the same resolved view
        echoed = yaml.safe_load((art / "resolved_config.yaml").read_text())
        assert echoed["train"]["total_episodes"] == 50
        assert echoed["world"]["node_count_range"] == [2, 2]

    def test_virtual_jammer_training_echo(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           train=dict(TINY_TRAIN, total_episodes=1),
                           defense={"mode": "virtual_jammer",
                                    "virtual_position": [0, 0]})
        assert main(["train-uav", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "virtual jammer during training: position (0, 0)" in out

    def test_higher_threshold_echoes_training_threshold(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           train=dict(TINY_TRAIN, total_episodes=1),
                           defense={"mode": "higher_threshold"})
        assert main(["train-uav", "--config", cfg]) == 0
        assert "training sinr_threshold: 3.9" in capsys.readouterr().out

    def test_rejects_intelligent_defense(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           defense={"mode": "intelligent"})
        assert main(["train-uav", "--config", cfg]) == 2
        assert "config error" in capsys.readouterr().err

    def test_rejects_mobile_jammer_world(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER))
        assert main(["train-uav", "--config", cfg]) == 2
        assert "train-jammer" in capsys.readouterr().err

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           train=dict(TINY_TRAIN, batchsize=4))
        assert main(["train-uav", "--config", cfg]) == 2
        assert "train.batchsize" in capsys.readouterr().err

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_numerical_failure_exit_4(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           train=dict(TINY_TRAIN, lr=1.0e200))
        assert main(["train-uav", "--config", cfg]) == 4
        assert "numerical failure" in capsys.readouterr().err

    def test_seed_and_out_overrides(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "ignored",
                           train=dict(TINY_TRAIN, total_episodes=1))
        other = tmp_path / "actual"
        assert main(["train-uav", "--config", cfg, "--seed", "99",
                     "--out", str(other)]) == 0
        echoed = yaml.safe_load((other / "resolved_config.yaml").read_text())
        assert echoed["seed"] == 99
        assert not (tmp_path / "ignored").exists()


class TestTrainJammer:
    def test_ten_episode_smoke_run(self, tmp_path, trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           train=dict(TINY_TRAIN, total_episodes=10),
                           checkpoints={"uav": str(trained_uav)})
        assert main(["train-jammer", "--config", cfg]) == 0
        assert "attacking frozen policy" in capsys.readouterr().out
        ckpt = tmp_path / "art" / "jammer_checkpoint.npz"
        _, meta = load_checkpoint(ckpt)
        assert meta["extra"]["kind"] == "jammer"
        with open(tmp_path / "art" / "curve.csv") as fh:
            assert len(list(csv.DictReader(fh))) == 10

    def test_requires_uav_checkpoint_key(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER))
        assert main(["train-jammer", "--config", cfg]) == 2
        assert "checkpoints.uav" in capsys.readouterr().err

    def test_missing_checkpoint_file_exit_3(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           checkpoints={"uav": str(tmp_path / "nope.npz")})
        assert main(["train-jammer", "--config", cfg]) == 3
        assert "checkpoint error" in capsys.readouterr().err

    def test_action_count_mismatch_exit_3(self, tmp_path, trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           world=world_section(k_speeds=2),
                           jammer=dict(INTEL_JAMMER),
                           checkpoints={"uav": str(trained_uav)})
        assert main(["train-jammer", "--config", cfg]) == 3
        assert "actions" in capsys.readouterr().err

    def test_requires_mobile_jammer(self, tmp_path, trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(CONT_JAMMER),
                           checkpoints={"uav": str(trained_uav)})
        assert main(["train-jammer", "--config", cfg]) == 2
        capsys.readouterr()


class TestTrainDefense:
    def test_smoke_with_assumption_flag(self, tmp_path, trained_jammer, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           defense={"mode": "intelligent",
                                    "jammer_history_len": 2},
                           checkpoints={"jammer": str(trained_jammer)})
        assert main(["train-defense", "--config", cfg, "--assumption", "2"]) == 0
        out = capsys.readouterr().out
        assert "velocity filter" in out
        ckpt = tmp_path / "art" / "defense_checkpoint.npz"
        _, meta = load_checkpoint(ckpt)
        assert meta["extra"]["defense"]["mode"] == "intelligent"
        assert meta["extra"]["defense"]["use_velocity_filter"] is True

    def test_deadline_loosening_honored(self, tmp_path, trained_jammer, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           world=world_section(mission_deadline=55.0),
                           jammer=dict(INTEL_JAMMER),
                           defense={"mode": "intelligent",
                                    "jammer_history_len": 2},
                           train=dict(TINY_TRAIN, total_episodes=1),
                           checkpoints={"jammer": str(trained_jammer)})
        assert main(["train-defense", "--config", cfg, "--assumption", "1"]) == 0
        out = capsys.readouterr().out
        assert "mission deadline 55 s" in out
        assert "jammer position fully observed" in out

    def test_requires_intelligent_defense_mode(self, tmp_path, trained_jammer,
                                               capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           checkpoints={"jammer": str(trained_jammer)})
        assert main(["train-defense", "--config", cfg]) == 2
        capsys.readouterr()

    def test_rejects_uav_checkpoint_as_jammer(self, tmp_path, trained_uav,
                                              capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           defense={"mode": "intelligent",
                                    "jammer_history_len": 2},
                           checkpoints={"jammer": str(trained_uav)})
        assert main(["train-defense", "--config", cfg]) == 3
        assert "expected a jammer checkpoint" in capsys.readouterr().err


class TestEval:
    def test_single_episode(self, tmp_path, trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           checkpoints={"uav": str(trained_uav)})
        assert main(["eval", "--config", cfg, "--episodes", "1"]) == 0
        capsys.readouterr()
        summary = json.loads((tmp_path / "art" / "metrics.json").read_text())
        assert summary["episodes"] == 1
        assert summary["sr"] in (0.0, 100.0)

    def test_matched_seeds_are_deterministic(self, tmp_path, trained_uav,
                                             capsys):
        outs = []
        for name in ("one", "two"):
            cfg = write_config(tmp_path, tmp_path / name, name=f"{name}.yaml",
                               checkpoints={"uav": str(trained_uav)})
            assert main(["eval", "--config", cfg, "--episodes", "3"]) == 0
            outs.append((tmp_path / name / "metrics.json").read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1]

    def test_worker_fanout_matches_serial(self, tmp_path, trained_uav, capsys):
        outs = []
        for name, workers in (("serial", "1"), ("fanout", "3")):
            cfg = write_config(tmp_path, tmp_path / name, name=f"{name}.yaml",
                               jammer=dict(CONT_JAMMER),
                               checkpoints={"uav": str(trained_uav)})
            assert main(["eval", "--config", cfg, "--episodes", "6",
                         "--workers", workers]) == 0
            outs.append((tmp_path / name / "metrics.json").read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1]

    def test_export_trajectories(self, tmp_path, trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(CONT_JAMMER),
                           checkpoints={"uav": str(trained_uav)})
        assert main(["eval", "--config", cfg, "--episodes", "2",
                     "--export-traj"]) == 0
        capsys.readouterr()
        for index in range(2):
            path = tmp_path / "art" / f"traj_ep{index:04d}.csv"
            with open(path) as fh:
                rows = list(csv.DictReader(fh))
            assert list(rows[0]) == TRAJECTORY_COLUMNS
            assert rows[0]["step"] == "0"

    def test_intelligent_world_needs_jammer_checkpoint(self, tmp_path,
                                                       trained_uav, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           checkpoints={"uav": str(trained_uav)})
        assert main(["eval", "--config", cfg, "--episodes", "1"]) == 2
        assert "checkpoints.jammer" in capsys.readouterr().err

    def test_eval_against_trained_jammer(self, tmp_path, trained_uav,
                                         trained_jammer, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER),
                           checkpoints={"uav": str(trained_uav),
                                        "jammer": str(trained_jammer)})
        assert main(["eval", "--config", cfg, "--episodes", "2"]) == 0
        capsys.readouterr()
        summary = json.loads((tmp_path / "art" / "metrics.json").read_text())
        assert summary["episodes"] == 2


class TestRegion:
    def test_grid_shape_and_resolution_flag(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(CONT_JAMMER))
        assert main(["region", "--config", cfg]) == 0
        fine = read_region(tmp_path / "art" / "region.csv")
        assert len(fine) == 40 * 40
        assert main(["region", "--config", cfg, "--resolution", "2",
                     "--out", str(tmp_path / "coarse")]) == 0
        capsys.readouterr()
        coarse = read_region(tmp_path / "coarse" / "region.csv")
        assert len(coarse) == 20 * 20

    def test_jammer_shrinks_region(self, tmp_path, capsys):
        quiet = write_config(tmp_path, tmp_path / "quiet", name="q.yaml")
        loud = write_config(tmp_path, tmp_path / "loud", name="l.yaml",
                            jammer=dict(CONT_JAMMER))
        assert main(["region", "--config", quiet]) == 0
        assert main(["region", "--config", loud]) == 0
        capsys.readouterr()
        clean = read_region(tmp_path / "quiet" / "region.csv")
        jammed = read_region(tmp_path / "loud" / "region.csv")
        assert sum(jammed.values()) < sum(clean.values())
        assert all(clean[cell] == 1 for cell, ok in jammed.items() if ok == 1)

    def test_periodic_emission_windows(self, tmp_path, capsys):
        periodic = dict(CONT_JAMMER, kind="periodic", period_on=10.0,
                        period_total=20.0)
        base = write_config(tmp_path, tmp_path / "none", name="n.yaml")
        cont = write_config(tmp_path, tmp_path / "cont", name="c.yaml",
                            jammer=dict(CONT_JAMMER))
        per = write_config(tmp_path, tmp_path / "off", name="p.yaml",
                           jammer=periodic)
        assert main(["region", "--config", base]) == 0
        assert main(["region", "--config", cont]) == 0
        assert main(["region", "--config", per, "--at", "15"]) == 0
        assert main(["region", "--config", per, "--at", "5",
                     "--out", str(tmp_path / "on")]) == 0
        capsys.readouterr()
        assert read_region(tmp_path / "off" / "region.csv") == \
            read_region(tmp_path / "none" / "region.csv")
        assert read_region(tmp_path / "on" / "region.csv") == \
            read_region(tmp_path / "cont" / "region.csv")

    def test_rejects_mobile_jammer(self, tmp_path, capsys):
        cfg = write_config(tmp_path, tmp_path / "art",
                           jammer=dict(INTEL_JAMMER))
        assert main(["region", "--config", cfg]) == 2
        capsys.readouterr()


class TestEntryPoint:
    def test_module_invocation_subprocess(self, tmp_path):
        cfg = write_config(tmp_path, tmp_path / "art")
        proc = subprocess.run(
            [sys.executable, "-m", "uavjam.cli", "region", "--config", cfg,
             "--resolution", "4"],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "art" / "region.csv").exists()

    def test_bad_verb_exits_nonzero(self):
        with pytest.raises(SystemExit):
            main(["transmogrify"])
