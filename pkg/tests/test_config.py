"""Run-configuration document parsing and serialization."""

import json

import pytest

from agilerv.config import (
    default_run_config,
    load_run_config,
    run_config_from_dict,
    run_config_to_dict,
    write_run_config,
)


def test_empty_document_yields_defaults():
    cfg = run_config_from_dict({})
    assert cfg == default_run_config()


def test_sections_override_single_fields():
    cfg = run_config_from_dict(
        {
            "radar": {"scr_db": 15.0},
            "plan": {"maps_per_condition": 3, "wave_heights": [0.5, 1.5]},
            "features": {"threshold_db": -30.0},
            "gbdt": {"n_trees": 7},
        }
    )
    assert cfg.radar.scr_db == 15.0
    assert cfg.radar.f0 == 16e9  # untouched default
    assert cfg.plan.maps_per_condition == 3
    assert cfg.plan.wave_heights == (0.5, 1.5)  # JSON list becomes tuple
    assert cfg.features.threshold_db == -30.0
    assert cfg.gbdt.n_trees == 7


def test_scr_db_accepts_inf_string():
    cfg = run_config_from_dict({"radar": {"scr_db": "inf"}})
    assert cfg.radar.scr_db == float("inf")


def test_unknown_key_is_named_with_its_section():
    with pytest.raises(ValueError, match=r"f00.*'radar'"):
        run_config_from_dict({"radar": {"f00": 1e9}})


def test_unknown_section_is_named():
    with pytest.raises(ValueError, match="radars"):
        run_config_from_dict({"radars": {}})


def test_section_validation_propagates():
    with pytest.raises(ValueError, match="n_trees"):
        run_config_from_dict({"gbdt": {"n_trees": -1}})
    with pytest.raises(ValueError, match="split_ratio"):
        run_config_from_dict({"plan": {"split_ratio": 1.0}})


def test_dict_round_trip_preserves_everything():
    cfg = run_config_from_dict(
        {
            "radar": {"scr_db": "inf"},
            "plan": {"wave_heights": [1.0], "azimuths_deg": [45.0, 90.0]},
            "gbdt": {"seed": 7},
        }
    )
    doc = run_config_to_dict(cfg)
    assert doc["radar"]["scr_db"] == "inf"  # JSON-safe encoding
    assert doc["plan"]["azimuths_deg"] == [45.0, 90.0]
    assert run_config_from_dict(doc) == cfg


def test_file_round_trip(tmp_path):
    cfg = run_config_from_dict({"plan": {"maps_per_condition": 2}})
    path = tmp_path / "run.json"
    write_run_config(cfg, str(path))
    loaded = load_run_config(str(path))
    assert loaded == cfg
    # the file itself is plain JSON
    assert json.loads(path.read_text())["plan"]["maps_per_condition"] == 2


def test_non_object_document_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2, 3]\n")
    with pytest.raises(ValueError, match="JSON object"):
        load_run_config(str(path))


def test_default_document_is_self_describing():
    doc = run_config_to_dict(default_run_config())
    assert set(doc) == {"radar", "plan", "features", "gbdt"}
    assert doc["plan"]["azimuths_deg"][0] == 10.0
    assert doc["plan"]["azimuths_deg"][-1] == 170.0
    assert run_config_from_dict(doc) == default_run_config()
