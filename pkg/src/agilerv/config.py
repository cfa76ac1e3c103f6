"""JSON run-configuration schema.

One document with four optional sections, each mapping onto a config
dataclass; omitted keys keep their defaults, unknown keys are rejected:

    {
      "radar":    { RadarParams fields, e.g. "f0": 16e9, "scr_db": 20.0 },
      "plan":     { ExperimentPlan fields, e.g. "wave_heights": [0.1, 1, 2] },
      "features": { FeatureConfig fields, e.g. "threshold_db": -25 },
      "gbdt":     { GBDTConfig fields, e.g. "n_trees": 200 }
    }

scr_db accepts the string "inf" for a clutter-free run.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .features import FeatureConfig
from .gbdt import GBDTConfig
from .harness import ExperimentPlan
from .params import RadarParams

__all__ = ["RunConfig", "default_run_config", "load_run_config", "write_run_config",
           "run_config_from_dict", "run_config_to_dict"]

_SECTIONS = {
    "radar": RadarParams,
    "plan": ExperimentPlan,
    "features": FeatureConfig,
    "gbdt": GBDTConfig,
}


@dataclass
class RunConfig:
    radar: RadarParams
    plan: ExperimentPlan
    features: FeatureConfig
    gbdt: GBDTConfig


def default_run_config() -> RunConfig:
    return RunConfig(RadarParams(), ExperimentPlan(), FeatureConfig(), GBDTConfig())


def _build_section(cls, data: dict, section: str):
    valid = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - valid
    if unknown:
        raise ValueError(
            f"unknown key(s) {sorted(unknown)} in config section '{section}'; "
            f"valid keys: {sorted(valid)}"
        )
    coerced = {}
    for key, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        if key == "scr_db" and isinstance(value, str):
            value = float(value)
        coerced[key] = value
    return cls(**coerced)


def run_config_from_dict(doc: dict) -> RunConfig:
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ValueError(
            f"unknown config section(s) {sorted(unknown)}; "
            f"valid sections: {sorted(_SECTIONS)}"
        )
    parts = {}
    for section, cls in _SECTIONS.items():
        parts[section] = _build_section(cls, doc.get(section, {}), section)
    return RunConfig(**parts)


def load_run_config(path: str) -> RunConfig:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config document must be a JSON object")
    return run_config_from_dict(doc)


def run_config_to_dict(cfg: RunConfig) -> dict:
    doc = {}
    for section in _SECTIONS:
        data = dataclasses.asdict(getattr(cfg, section))
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
            elif isinstance(value, float) and value == float("inf"):
                data[key] = "inf"
        doc[section] = data
    return doc


def write_run_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(run_config_to_dict(cfg), fh, indent=2)
        fh.write("\n")
