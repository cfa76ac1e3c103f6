"""Experiment driver: scenario sweeps, dataset generation, training, reports.

A condition is one (wave height, azimuth, class, trial) tuple. All of a
condition's randomness — azimuth jitter, sea-state draws, hop code,
clutter — derives from the master seed plus the condition key, so any
subset of conditions regenerates identically regardless of plan shape,
and cached feature rows are content-addressed by everything that can
change them.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .echo import PulseTrain, add_clutter, generate_hop_code, synthesize_echo
from .features import (
    FeatureConfig,
    FeatureRecord,
    FeatureVector,
    featurize,
    read_feature_table,
    write_feature_table,
)
from .gbdt import GBDTConfig, TrainedModel, evaluate, train
from .params import RadarParams
from .rvmap import RVMap, build_rv_map
from .scene import (
    REFLECTOR_ARRAY,
    SHIP,
    ObservationGeometry,
    SeaState,
    default_reflector_array,
    default_ship,
    generate_attitude,
    project_scatterers,
)

__all__ = [
    "ExperimentPlan",
    "RunReport",
    "build_condition_map",
    "generate_dataset",
    "split_dataset",
    "run_experiment",
    "rank_auc",
    "write_trend_csv",
    "render_trend_png",
]

_ATTITUDE_SAMPLES = 64


@dataclass
class ExperimentPlan:
    """Sweep definition plus the scene/map knobs that shape each condition."""

    wave_heights: tuple[float, ...] = (0.1, 1.0, 2.0)
    azimuths_deg: tuple[float, ...] = tuple(float(a) for a in range(10, 171, 10))
    elevation_deg: float = 2.0
    maps_per_condition: int = 10
    split_ratio: float = 0.7
    master_seed: int = 7041
    azimuth_jitter_deg: float = 2.0
    pooled_training: bool = False
    r0: float = 10000.0
    gate_offset: float = 1000.0   # receive gate opens this far before r0
    pivot_depth: float = 5.0      # reflector buoy lever arm, m
    v_max: float = 4.5
    pad_factor: int = 4
    window: str = "hann"

    def __post_init__(self) -> None:
        self.wave_heights = tuple(float(h) for h in self.wave_heights)
        self.azimuths_deg = tuple(float(a) for a in self.azimuths_deg)
        if len(self.wave_heights) == 0 or any(h < 0.0 for h in self.wave_heights):
            raise ValueError("wave heights must be non-negative and non-empty")
        if len(self.azimuths_deg) == 0 or any(
            not 0.0 <= a <= 180.0 for a in self.azimuths_deg
        ):
            raise ValueError("azimuths must lie within [0, 180] degrees")
        if self.maps_per_condition < 1:
            raise ValueError("maps_per_condition must be at least 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must be in (0, 1)")
        if self.azimuth_jitter_deg < 0.0:
            raise ValueError("azimuth jitter must be non-negative")
        if self.r0 <= 0.0 or self.gate_offset < 0.0:
            raise ValueError("r0 must be positive and gate_offset non-negative")
        if self.v_max <= 0.0 or self.pad_factor < 1:
            raise ValueError("v_max must be positive and pad_factor at least 1")


def _condition_children(plan: ExperimentPlan, hs: float, theta: float, label: int,
                        trial: int) -> list[np.random.SeedSequence]:
    key = (int(round(hs * 1000)), int(round(theta * 1000)), label, trial)
    return np.random.SeedSequence(plan.master_seed, spawn_key=key).spawn(4)


def _seed_int(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1)[0])


def _map_id(plan: ExperimentPlan, radar: RadarParams, fcfg: FeatureConfig,
            hs: float, theta: float, label: int, trial: int) -> str:
    ident = repr((
        "feature-row-v2",
        (radar.f0, radar.n_carriers, radar.delta_f, radar.tp, radar.fs, radar.b,
         radar.tr, radar.n_pulses, radar.scr_db),
        (plan.master_seed, plan.elevation_deg, plan.azimuth_jitter_deg, plan.r0,
         plan.gate_offset, plan.pivot_depth, plan.v_max, plan.pad_factor, plan.window),
        (fcfg.threshold_db, fcfg.max_points, fcfg.prominence_db,
         fcfg.prominence_radius_m, fcfg.subcell, fcfg.weight_mode, fcfg.weighted_fit,
         tuple(sorted(fcfg.extra.items()))),
        (hs, theta, label, trial),
    ))
    return hashlib.sha1(ident.encode()).hexdigest()[:16]


def build_condition_map(
    plan: ExperimentPlan,
    radar: RadarParams,
    hs: float,
    theta: float,
    label: int,
    trial: int,
) -> RVMap:
    """Scene -> attitudes -> echo -> RV map for one condition trial.

    Reflector-array echoes are synthesized per unit without clutter and
    summed sample-wise (independent scatterer superposition); clutter is
    then added once against the total mean signal power. Ships follow
    the identical path with their single rigid unit.
    """
    scene_seq, sea_seq, hop_seq, clutter_seq = _condition_children(
        plan, hs, theta, label, trial
    )
    rng = np.random.default_rng(scene_seq)
    theta_actual = theta + rng.uniform(-plan.azimuth_jitter_deg, plan.azimuth_jitter_deg)
    geom = ObservationGeometry(plan.r0, theta_actual, plan.elevation_deg)
    kind = SHIP if label == 1 else REFLECTOR_ARRAY
    target = (
        default_ship()
        if label == 1
        else default_reflector_array(pivot_depth=plan.pivot_depth)
    )
    sea = SeaState(hs, _seed_int(sea_seq))
    attitudes = [
        generate_attitude(sea, kind, i, radar.cpi, _ATTITUDE_SAMPLES)
        for i in range(len(target.units))
    ]
    states = project_scatterers(target, geom, attitudes, radar.cpi)

    gate = plan.r0 - plan.gate_offset
    code = generate_hop_code(radar, _seed_int(hop_seq))
    noiseless = radar.with_scr(float("inf"))
    pulses = np.zeros((radar.n_pulses, radar.n_fast), dtype=np.complex128)
    start = 0
    for unit in target.units:
        stop = start + len(unit.points)
        pulses += synthesize_echo(states[start:stop], noiseless, code, 0,
                                  gate_range=gate).pulses
        start = stop
    clean = PulseTrain(pulses, code, noiseless, gate)
    noisy = add_clutter(clean, radar.scr_db, _seed_int(clutter_seq))
    rv_map = build_rv_map(noisy, v_max=plan.v_max, pad_factor=plan.pad_factor,
                          window=plan.window)
    rv_map.meta.update(
        label=label, hs=hs, theta=theta, theta_actual=theta_actual, trial=trial
    )
    return rv_map


def _feature_row(args: tuple) -> FeatureRecord:
    plan, radar, fcfg, cache_dir, hs, theta, label, trial = args
    map_id = _map_id(plan, radar, fcfg, hs, theta, label, trial)
    cache_path = (
        os.path.join(cache_dir, f"{map_id}.csv") if cache_dir is not None else None
    )
    if cache_path is not None and os.path.exists(cache_path):
        return read_feature_table(cache_path)[0]
    try:
        rv_map = build_condition_map(plan, radar, hs, theta, label, trial)
        rv_map.meta["map_id"] = map_id
        vector = featurize(rv_map, fcfg)
    except Exception as exc:
        raise RuntimeError(
            f"condition (hs={hs}, theta={theta}, label={label}, trial={trial}) "
            f"failed: {exc}"
        ) from exc
    record = FeatureRecord(map_id, hs, theta, label, vector)
    if cache_path is not None:
        write_feature_table([record], cache_path)
    return record


def generate_dataset(
    plan: ExperimentPlan,
    radar: RadarParams,
    feature_config: FeatureConfig | None = None,
    cache_dir: str | None = None,
    jobs: int = 1,
    progress: bool = False,
) -> list[FeatureRecord]:
    """Generate the labeled feature table for the full condition sweep.

    Row order is the deterministic sweep order (hs, azimuth, class,
    trial); row count is |hs| * |azimuths| * 2 * maps_per_condition.
    With cache_dir set, rows are reused from content-addressed files.
    """
    fcfg = feature_config or FeatureConfig()
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
    work = [
        (plan, radar, fcfg, cache_dir, hs, theta, label, trial)
        for hs in plan.wave_heights
        for theta in plan.azimuths_deg
        for label in (0, 1)
        for trial in range(plan.maps_per_condition)
    ]
    records: list[FeatureRecord] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, rec in enumerate(pool.map(_feature_row, work, chunksize=4)):
                records.append(rec)
                if progress and (i + 1) % 50 == 0:
                    print(f"  {i + 1}/{len(work)} maps", flush=True)
    else:
        for i, item in enumerate(work):
            records.append(_feature_row(item))
            if progress and (i + 1) % 50 == 0:
                print(f"  {i + 1}/{len(work)} maps", flush=True)
    return records


def split_dataset(
    records: list[FeatureRecord], ratio: float, seed: int
) -> tuple[list[FeatureRecord], list[FeatureRecord]]:
    """Stratified train/test split by (class, wave height).

    Each stratum contributes floor(ratio * n) rows to training and the
    remainder to test, drawn by a deterministic permutation of the seed.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("split ratio must be in (0, 1)")
    strata: dict[tuple[int, float], list[int]] = {}
    for i, rec in enumerate(records):
        strata.setdefault((rec.label, rec.hs), []).append(i)
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    for key in sorted(strata):
        idx = strata[key]
        if len(idx) < 2:
            raise ValueError(f"stratum (label={key[0]}, hs={key[1]}) has fewer than 2 rows")
        perm = rng.permutation(len(idx))
        # floor of the intended decimal ratio: 0.7 * 90 is 62.99999...
        # in binary, which must still count as 63
        n_train = math.floor(ratio * len(idx) + 1e-9)
        train_idx.extend(idx[j] for j in perm[:n_train])
    chosen = set(train_idx)
    train = [records[i] for i in sorted(chosen)]
    test = [records[i] for i in range(len(records)) if i not in chosen]
    return train, test


def _design_matrix(records: list[FeatureRecord]) -> tuple[np.ndarray, np.ndarray, list[str]]:
    extra_keys = tuple(sorted({k for r in records for k in r.vector.extra}))
    x = np.array([r.vector.values() for r in records])
    y = np.array([r.label for r in records])
    return x, y, FeatureVector.names(extra_keys)


def rank_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    """Area under the ROC curve of `scores` for the boolean positive mask.

    Rank statistic (Mann-Whitney) with average ranks on ties.
    """
    scores = np.asarray(scores, dtype=float)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative samples")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    r_pos = ranks[positives].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class RunReport:
    """Deterministic experiment outcome (timing excluded from identity)."""

    per_hs: dict[float, dict]
    feature_stats: dict[float, dict[str, dict[str, float]]]
    degenerate_count: int
    n_rows: int
    pooled: bool
    elapsed_s: float = 0.0

    def __post_init__(self) -> None:
        for hs, metrics in self.per_hs.items():
            if not 0.0 <= metrics["accuracy"] <= 1.0:
                raise ValueError(f"accuracy out of range for hs={hs}")
            total = metrics["tp"] + metrics["tn"] + metrics["fp"] + metrics["fn"]
            if total != metrics["n_test"]:
                raise ValueError(f"confusion counts disagree with n_test for hs={hs}")

    def deterministic_dict(self) -> dict:
        return {
            "per_hs": {repr(h): m for h, m in sorted(self.per_hs.items())},
            "feature_stats": {
                repr(h): s for h, s in sorted(self.feature_stats.items())
            },
            "degenerate_count": self.degenerate_count,
            "n_rows": self.n_rows,
            "pooled": self.pooled,
        }


def _feature_summary(records: list[FeatureRecord]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    x, y, names = _design_matrix(records)
    for j, name in enumerate(names):
        ship = x[y == 1, j]
        array = x[y == 0, j]
        out[name] = {
            "ship_median": float(np.median(ship)) if len(ship) else float("nan"),
            "array_median": float(np.median(array)) if len(array) else float("nan"),
            "ship_mean": float(np.mean(ship)) if len(ship) else float("nan"),
            "array_mean": float(np.mean(array)) if len(array) else float("nan"),
        }
    return out


def run_experiment(
    plan: ExperimentPlan,
    radar: RadarParams,
    gbdt_config: GBDTConfig | None = None,
    feature_config: FeatureConfig | None = None,
    cache_dir: str | None = None,
    out_dir: str | None = None,
    jobs: int = 1,
    progress: bool = False,
) -> RunReport:
    """Full pipeline: dataset, split, per-wave-height models, evaluation.

    One model is trained per wave height (plan.pooled_training=True
    trains a single model on all heights instead). Writes the accuracy
    trend CSV/PNG and serialized models when out_dir is given.
    """
    from .gbdt import save_model

    gcfg = gbdt_config or GBDTConfig()
    t0 = time.perf_counter()
    records = generate_dataset(plan, radar, feature_config, cache_dir, jobs, progress)
    train_recs, test_recs = split_dataset(records, plan.split_ratio, plan.master_seed)

    models: dict[float, TrainedModel] = {}
    if plan.pooled_training:
        x, y, names = _design_matrix(train_recs)
        pooled_model = train(x, y, gcfg, names)
        for hs in plan.wave_heights:
            models[hs] = pooled_model
    else:
        for hs in plan.wave_heights:
            subset = [r for r in train_recs if r.hs == hs]
            x, y, names = _design_matrix(subset)
            models[hs] = train(x, y, gcfg, names)

    per_hs: dict[float, dict] = {}
    feature_stats: dict[float, dict] = {}
    for hs in plan.wave_heights:
        test_subset = [r for r in test_recs if r.hs == hs]
        x, y, _ = _design_matrix(test_subset)
        metrics = evaluate(models[hs], x, y)
        metrics["n_test"] = len(test_subset)
        metrics["n_train"] = sum(1 for r in train_recs if r.hs == hs)
        per_hs[hs] = metrics
        feature_stats[hs] = _feature_summary([r for r in records if r.hs == hs])

    report = RunReport(
        per_hs=per_hs,
        feature_stats=feature_stats,
        degenerate_count=sum(1 for r in records if r.vector.degenerate),
        n_rows=len(records),
        pooled=plan.pooled_training,
        elapsed_s=time.perf_counter() - t0,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_feature_table(records, os.path.join(out_dir, "features.csv"))
        write_trend_csv(report, os.path.join(out_dir, "accuracy_vs_hs.csv"))
        render_trend_png(report, os.path.join(out_dir, "accuracy_vs_hs.png"))
        for hs, model in models.items():
            save_model(model, os.path.join(out_dir, f"model_hs_{hs:g}.json"))
    return report


def write_trend_csv(report: RunReport, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("hs_m,accuracy,logloss,n_train,n_test\n")
        for hs in sorted(report.per_hs):
            m = report.per_hs[hs]
            fh.write(
                f"{hs:g},{m['accuracy']:.6f},{m['logloss']:.6f},"
                f"{m['n_train']},{m['n_test']}\n"
            )


def render_trend_png(report: RunReport, path: str) -> None:
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    hs = sorted(report.per_hs)
    acc = [report.per_hs[h]["accuracy"] for h in hs]
    fig = Figure(figsize=(6.0, 4.0))
    canvas = FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    ax.plot(hs, acc, "o-")
    ax.set_xlabel("significant wave height (m)")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    canvas.print_png(path)
