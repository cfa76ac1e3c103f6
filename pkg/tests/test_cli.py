"""Command-line interface: flags, subcommands, and artifact wiring."""

import argparse
import json
import os

import numpy as np
import pytest

from agilerv import read_feature_table, read_rv_map_npz
from agilerv.cli import _load, main
from agilerv.config import default_run_config, run_config_from_dict, write_run_config

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@pytest.fixture(scope="module")
def micro_config(tmp_path_factory):
    """Two azimuths x two trials per class at hs = 1: eight maps total."""
    path = tmp_path_factory.mktemp("cfg") / "micro.json"
    cfg = run_config_from_dict(
        {
            "plan": {
                "wave_heights": [1.0],
                "azimuths_deg": [45.0, 135.0],
                "maps_per_condition": 2,
            },
            "gbdt": {"n_trees": 20},
        }
    )
    write_run_config(cfg, str(path))
    return str(path)


@pytest.fixture(scope="module")
def pipeline_dir(micro_config, tmp_path_factory):
    """Shared output directory with the dataset already generated."""
    out = str(tmp_path_factory.mktemp("pipeline"))
    assert main(["dataset", "--config", micro_config, "--out-dir", out]) == 0
    return out


def test_help_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "simulate" in capsys.readouterr().out


def test_missing_subcommand_is_an_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code != 0


def test_flag_plumbing_overrides_the_plan(micro_config):
    base = argparse.Namespace(config=None, seed=None, paper_scale=False, out_dir="out")
    cfg = _load(base)
    assert cfg == default_run_config()
    loaded = _load(argparse.Namespace(config=micro_config, seed=None,
                                      paper_scale=False, out_dir="out"))
    assert loaded.plan.maps_per_condition == 2
    bumped = _load(argparse.Namespace(config=micro_config, seed=99,
                                      paper_scale=True, out_dir="out"))
    assert bumped.plan.master_seed == 99
    assert bumped.plan.maps_per_condition == 100
    assert bumped.radar == loaded.radar  # radar untouched by plan flags


def test_simulate_writes_map_artifacts(tmp_path, capsys):
    out = str(tmp_path / "sim")
    rc = main([
        "simulate", "--kind", "ship", "--hs", "1", "--theta", "45",
        "--trial", "0", "--out-dir", out, "--csv",
    ])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert not doc["degenerate"]
    assert doc["mwr"] >= 0.0
    stem = os.path.join(out, "map_ship_hs1_th45_t0")
    assert doc["map"] == stem + ".npz"
    rv = read_rv_map_npz(stem + ".npz")
    assert rv.matrix.ndim == 2 and np.all(np.isfinite(rv.matrix))
    assert rv.meta["label"] == 1
    assert open(stem + ".png", "rb").read(8) == PNG_MAGIC
    assert open(stem + ".csv").readline().startswith("velocity_mps\\range_m")


def test_simulate_seed_changes_the_draw(tmp_path, capsys):
    out = str(tmp_path / "seeds")
    main(["simulate", "--kind", "array", "--out-dir", out, "--seed", "1"])
    first = json.loads(capsys.readouterr().out)
    main(["simulate", "--kind", "array", "--out-dir", out, "--seed", "2"])
    second = json.loads(capsys.readouterr().out)
    assert (first["mwr"], first["sigma_r"]) != (second["mwr"], second["sigma_r"])


def test_dataset_writes_the_feature_table(pipeline_dir, micro_config):
    records = read_feature_table(os.path.join(pipeline_dir, "features.csv"))
    assert len(records) == 8  # 1 hs x 2 azimuths x 2 classes x 2 trials
    assert sum(r.label for r in records) == 4
    assert os.path.isdir(os.path.join(pipeline_dir, "cache"))


def test_train_then_eval_round_trip(pipeline_dir, micro_config, capsys):
    rc = main(["train", "--config", micro_config, "--out-dir", pipeline_dir])
    assert rc == 0
    assert "trained model_hs_1.json" in capsys.readouterr().out
    assert os.path.exists(os.path.join(pipeline_dir, "model_hs_1.json"))

    rc = main(["eval", "--config", micro_config, "--out-dir", pipeline_dir])
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    doc = json.load(open(os.path.join(pipeline_dir, "eval.json")))
    assert doc == printed
    assert set(doc) == {"1"}
    assert 0.0 <= doc["1"]["accuracy"] <= 1.0
    assert doc["1"]["tp"] + doc["1"]["tn"] + doc["1"]["fp"] + doc["1"]["fn"] == 4


def test_train_pooled_mode(pipeline_dir, micro_config, capsys):
    rc = main(["train", "--config", micro_config, "--out-dir", pipeline_dir, "--pooled"])
    assert rc == 0
    assert "model_pooled.json" in capsys.readouterr().out
    assert os.path.exists(os.path.join(pipeline_dir, "model_pooled.json"))


def test_report_produces_every_artifact(micro_config, tmp_path, capsys):
    out = str(tmp_path / "report")
    rc = main(["report", "--config", micro_config, "--out-dir", out])
    assert rc == 0
    assert "report written" in capsys.readouterr().out
    doc = json.load(open(os.path.join(out, "report.json")))
    assert doc["n_rows"] == 8
    assert "1.0" in doc["per_hs"]
    assert doc["per_hs"]["1.0"]["n_test"] + doc["per_hs"]["1.0"]["n_train"] == 8
    for name in ("features.csv", "accuracy_vs_hs.csv", "accuracy_vs_hs.png",
                 "model_hs_1.json"):
        assert os.path.exists(os.path.join(out, name)), name
    assert open(os.path.join(out, "accuracy_vs_hs.png"), "rb").read(8) == PNG_MAGIC


def test_bad_config_is_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"radar": {"bandwidth": 1}}')
    with pytest.raises(ValueError, match="bandwidth"):
        main(["dataset", "--config", str(path), "--out-dir", str(tmp_path / "o")])
