"""Command-line entry points.

Subcommands:
  simulate  build one condition's RV map; write .npz, .png and the
            extracted feature row
  dataset   generate the labeled feature table for the whole sweep
  train     fit per-wave-height classifiers on the training split
  eval      evaluate saved models on the held-out split
  report    full pipeline; writes report.json, accuracy trend CSV/PNG,
            features.csv and models

Shared flags: --config (JSON, see config module), --seed (overrides the
plan's master seed), --paper-scale (100 maps per condition), --out-dir,
--jobs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import RunConfig, default_run_config, load_run_config
from .features import featurize, read_feature_table, write_feature_table
from .gbdt import evaluate, load_model, save_model, train
from .harness import (
    build_condition_map,
    generate_dataset,
    run_experiment,
    split_dataset,
)
from .rvmap import render_rv_map_png, write_rv_map_csv, write_rv_map_npz

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--seed", type=int, help="override the plan master seed")
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="use 100 maps per condition instead of the desk-scale default",
    )
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers")


def _load(args: argparse.Namespace) -> RunConfig:
    cfg = load_run_config(args.config) if args.config else default_run_config()
    plan_updates = {}
    if args.seed is not None:
        plan_updates["master_seed"] = args.seed
    if args.paper_scale:
        plan_updates["maps_per_condition"] = 100
    if plan_updates:
        cfg = dataclasses.replace(cfg, plan=dataclasses.replace(cfg.plan, **plan_updates))
    return cfg


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load(args)
    label = 1 if args.kind == "ship" else 0
    rv_map = build_condition_map(
        cfg.plan, cfg.radar, args.hs, args.theta, label, args.trial
    )
    os.makedirs(args.out_dir, exist_ok=True)
    stem = os.path.join(
        args.out_dir, f"map_{args.kind}_hs{args.hs:g}_th{args.theta:g}_t{args.trial}"
    )
    write_rv_map_npz(rv_map, stem + ".npz")
    span = (
        cfg.plan.r0 - cfg.plan.gate_offset * 0.5,
        cfg.plan.r0 + cfg.plan.gate_offset * 0.5,
    )
    render_rv_map_png(rv_map, stem + ".png", range_window=span)
    if args.csv:
        write_rv_map_csv(rv_map, stem + ".csv")
    vector = featurize(rv_map, cfg.features)
    print(json.dumps({
        "map": stem + ".npz",
        "png": stem + ".png",
        "mwr": vector.mwr,
        "ccf": vector.ccf,
        "sigma_r": vector.sigma_r,
        "sigma_v": vector.sigma_v,
        "degenerate": vector.degenerate,
    }, indent=2))
    return 0


def _cmd_dataset(args: argparse.Namespace) -> int:
    cfg = _load(args)
    os.makedirs(args.out_dir, exist_ok=True)
    records = generate_dataset(
        cfg.plan,
        cfg.radar,
        cfg.features,
        cache_dir=os.path.join(args.out_dir, "cache"),
        jobs=args.jobs,
        progress=True,
    )
    path = os.path.join(args.out_dir, "features.csv")
    write_feature_table(records, path)
    print(f"wrote {len(records)} rows to {path}")
    return 0


def _features_path(args: argparse.Namespace) -> str:
    return args.features or os.path.join(args.out_dir, "features.csv")


def _cmd_train(args: argparse.Namespace) -> int:
    cfg = _load(args)
    records = read_feature_table(_features_path(args))
    train_recs, _ = split_dataset(records, cfg.plan.split_ratio, cfg.plan.master_seed)
    os.makedirs(args.out_dir, exist_ok=True)
    from .harness import _design_matrix

    groups: dict[float, list] = {}
    if cfg.plan.pooled_training or args.pooled:
        groups[float("nan")] = train_recs
    else:
        for rec in train_recs:
            groups.setdefault(rec.hs, []).append(rec)
    for hs, subset in sorted(groups.items()):
        x, y, names = _design_matrix(subset)
        model = train(x, y, cfg.gbdt, names)
        name = "model_pooled.json" if hs != hs else f"model_hs_{hs:g}.json"
        save_model(model, os.path.join(args.out_dir, name))
        print(f"trained {name} on {len(subset)} rows")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load(args)
    records = read_feature_table(_features_path(args))
    _, test_recs = split_dataset(records, cfg.plan.split_ratio, cfg.plan.master_seed)
    from .harness import _design_matrix

    model_dir = args.models or args.out_dir
    results = {}
    for hs in sorted({r.hs for r in test_recs}):
        subset = [r for r in test_recs if r.hs == hs]
        pooled = os.path.join(model_dir, "model_pooled.json")
        per_hs = os.path.join(model_dir, f"model_hs_{hs:g}.json")
        model = load_model(per_hs if os.path.exists(per_hs) else pooled)
        x, y, _ = _design_matrix(subset)
        results[f"{hs:g}"] = evaluate(model, x, y)
    print(json.dumps(results, indent=2))
    out = os.path.join(args.out_dir, "eval.json")
    os.makedirs(args.out_dir, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(results, fh, indent=2)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    cfg = _load(args)
    report = run_experiment(
        cfg.plan,
        cfg.radar,
        cfg.gbdt,
        cfg.features,
        cache_dir=os.path.join(args.out_dir, "cache"),
        out_dir=args.out_dir,
        jobs=args.jobs,
        progress=True,
    )
    doc = report.deterministic_dict()
    doc["elapsed_s"] = round(report.elapsed_s, 3)
    path = os.path.join(args.out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
    for hs in sorted(report.per_hs):
        m = report.per_hs[hs]
        print(f"hs={hs:g}: accuracy={m['accuracy']:.4f} logloss={m['logloss']:.4f} "
              f"(test n={m['n_test']})")
    print(f"report written to {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="agilerv",
        description="Frequency-agile radar ship/decoy discrimination pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="build one RV map")
    p_sim.add_argument("--kind", choices=("ship", "array"), default="ship")
    p_sim.add_argument("--hs", type=float, default=1.0, help="significant wave height, m")
    p_sim.add_argument("--theta", type=float, default=45.0, help="azimuth, degrees")
    p_sim.add_argument("--trial", type=int, default=0)
    p_sim.add_argument("--csv", action="store_true", help="also export the map as CSV")
    _add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_data = sub.add_parser("dataset", help="generate the feature table")
    _add_common(p_data)
    p_data.set_defaults(func=_cmd_dataset)

    p_train = sub.add_parser("train", help="fit classifiers on the training split")
    p_train.add_argument("--features", help="feature CSV (default <out-dir>/features.csv)")
    p_train.add_argument("--pooled", action="store_true",
                         help="train one model over all wave heights")
    _add_common(p_train)
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate saved models on the test split")
    p_eval.add_argument("--features", help="feature CSV (default <out-dir>/features.csv)")
    p_eval.add_argument("--models", help="model directory (default --out-dir)")
    _add_common(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_rep = sub.add_parser("report", help="full experiment with trend artifacts")
    _add_common(p_rep)
    p_rep.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
