"""Gradient-boosted decision trees for binary classification, from scratch.

Second-order boosting with logistic loss: per round, gradients
g = p - y and hessians h = p(1-p) drive an exact greedy split search
maximizing gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda)
- G^2/(H+lambda)] - gamma, with leaf weights -lr * G/(H+lambda).
Ties break toward the lowest feature index, then the lowest threshold,
so training is deterministic given the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "GBDTConfig",
    "TreeNode",
    "TrainedModel",
    "train",
    "predict_margin",
    "predict_proba",
    "evaluate",
    "save_model",
    "load_model",
    "model_to_text",
    "model_from_text",
]

_FORMAT = "gbdt-json-v1"


@dataclass
class GBDTConfig:
    n_trees: int = 200
    max_depth: int = 6
    learning_rate: float = 0.05
    subsample: float = 0.8
    colsample_bytree: float = 0.8
    reg_lambda: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    base_score: float = 0.5
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_trees < 0:
            raise ValueError("n_trees must be non-negative")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must be in (0, 1]")
        if not (0.0 < self.subsample <= 1.0):
            raise ValueError("subsample must be in (0, 1]")
        if not (0.0 < self.colsample_bytree <= 1.0):
            raise ValueError("colsample_bytree must be in (0, 1]")
        if self.reg_lambda < 0.0 or self.gamma < 0.0 or self.min_child_weight < 0.0:
            raise ValueError("reg_lambda, gamma and min_child_weight must be non-negative")
        if not (0.0 < self.base_score < 1.0):
            raise ValueError("base_score must be in (0, 1)")


@dataclass
class TreeNode:
    """Internal node (left/right set) or leaf (weight set, learning-rate scaled)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    weight: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class TrainedModel:
    trees: list[TreeNode]
    config: GBDTConfig
    n_features: int
    base_margin: float
    feature_names: list[str] | None = None


def _sigmoid(margin: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(margin, -500.0, 500.0)))


def _validate_features(x: np.ndarray, feature_names: list[str] | None) -> None:
    bad = np.nonzero(~np.isfinite(x).all(axis=0))[0]
    if len(bad):
        col = bad[0]
        name = feature_names[col] if feature_names else f"column {col}"
        raise ValueError(f"feature {name} contains non-finite values")


def _leaf(g_sum: float, h_sum: float, config: GBDTConfig) -> TreeNode:
    return TreeNode(weight=-config.learning_rate * g_sum / (h_sum + config.reg_lambda))


def _build_tree(
    x: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    idx: np.ndarray,
    cols: np.ndarray,
    depth: int,
    config: GBDTConfig,
) -> TreeNode:
    g_sum = float(g[idx].sum())
    h_sum = float(h[idx].sum())
    if depth >= config.max_depth or len(idx) < 2:
        return _leaf(g_sum, h_sum, config)

    lam = config.reg_lambda
    parent_score = g_sum * g_sum / (h_sum + lam)
    best_gain = 0.0
    best: tuple[int, float] | None = None
    for f in cols:
        order = idx[np.argsort(x[idx, f], kind="stable")]
        xe = x[order, f]
        gs = np.cumsum(g[order])
        hs = np.cumsum(h[order])
        # split between distinct consecutive values only
        cut = np.nonzero(xe[:-1] < xe[1:])[0]
        for c in cut:
            h_l = hs[c]
            h_r = h_sum - h_l
            if h_l < config.min_child_weight or h_r < config.min_child_weight:
                continue
            g_l = gs[c]
            g_r = g_sum - g_l
            gain = 0.5 * (
                g_l * g_l / (h_l + lam) + g_r * g_r / (h_r + lam) - parent_score
            ) - config.gamma
            if gain > best_gain:
                threshold = 0.5 * (xe[c] + xe[c + 1])
                # degenerate midpoint (adjacent floats): route like xgboost, x < t goes left
                if threshold <= xe[c]:
                    threshold = xe[c + 1]
                best_gain = gain
                best = (int(f), float(threshold))
    if best is None:
        return _leaf(g_sum, h_sum, config)

    feature, threshold = best
    go_left = x[idx, feature] < threshold
    left = _build_tree(x, g, h, idx[go_left], cols, depth + 1, config)
    right = _build_tree(x, g, h, idx[~go_left], cols, depth + 1, config)
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right)


def _predict_tree(node: TreeNode, x: np.ndarray, out: np.ndarray, idx: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] += node.weight
        return
    go_left = x[idx, node.feature] < node.threshold
    _predict_tree(node.left, x, out, idx[go_left])
    _predict_tree(node.right, x, out, idx[~go_left])


def train(
    x: np.ndarray,
    y: np.ndarray,
    config: GBDTConfig | None = None,
    feature_names: list[str] | None = None,
) -> TrainedModel:
    """Fit the boosted ensemble.

    Row subsampling is Bernoulli per round and feature subsampling draws
    ceil(colsample * d) distinct columns per tree, both from one stream
    seeded by config.seed (rows drawn before columns each round).
    Single-class data is accepted: every tree then pushes the margin
    toward that class.
    """
    config = config or GBDTConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    if len(x) != len(y) or len(x) == 0:
        raise ValueError("need one label per sample and at least one sample")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be 0 or 1")
    if feature_names is not None and len(feature_names) != x.shape[1]:
        raise ValueError("one feature name per column required")
    _validate_features(x, feature_names)

    n, d = x.shape
    base_margin = math.log(config.base_score / (1.0 - config.base_score))
    margins = np.full(n, base_margin)
    rng = np.random.default_rng(config.seed)
    n_cols = max(1, math.ceil(config.colsample_bytree * d))
    trees: list[TreeNode] = []
    for _ in range(config.n_trees):
        p = _sigmoid(margins)
        g = p - y
        h = p * (1.0 - p)
        rows = np.nonzero(rng.random(n) < config.subsample)[0]
        cols = np.sort(rng.choice(d, size=n_cols, replace=False))
        if len(rows) == 0:
            trees.append(TreeNode(weight=0.0))
            continue
        tree = _build_tree(x, g, h, rows, cols, 0, config)
        trees.append(tree)
        delta = np.zeros(n)
        _predict_tree(tree, x, delta, np.arange(n))
        margins += delta
    return TrainedModel(trees, config, d, base_margin, list(feature_names) if feature_names else None)


def predict_margin(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, got {x.shape[1]}"
        )
    out = np.full(len(x), model.base_margin)
    idx = np.arange(len(x))
    for tree in model.trees:
        _predict_tree(tree, x, out, idx)
    return out


def predict_proba(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    """Probability of class 1 (ship) as the sigmoid of the summed margins."""
    return _sigmoid(predict_margin(model, x))


def evaluate(model: TrainedModel, x: np.ndarray, y: np.ndarray) -> dict:
    """Accuracy at threshold 0.5, clamped logloss, and confusion counts."""
    y = np.asarray(y)
    if len(y) == 0:
        raise ValueError("cannot evaluate on an empty set")
    proba = predict_proba(model, x)
    pred = (proba >= 0.5).astype(int)
    clamped = np.clip(proba, 1e-15, 1.0 - 1e-15)
    logloss = float(-np.mean(y * np.log(clamped) + (1 - y) * np.log(1 - clamped)))
    return {
        "accuracy": float(np.mean(pred == y)),
        "logloss": logloss,
        "tp": int(np.sum((pred == 1) & (y == 1))),
        "tn": int(np.sum((pred == 0) & (y == 0))),
        "fp": int(np.sum((pred == 1) & (y == 0))),
        "fn": int(np.sum((pred == 0) & (y == 1))),
    }


# -- model interchange -----------------------------------------------------
#
# JSON text with float values emitted via repr, so a save/load cycle
# reproduces every split threshold and leaf weight bit-exactly.


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"weight": node.weight}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> TreeNode:
    if "weight" in data:
        return TreeNode(weight=float(data["weight"]))
    return TreeNode(
        feature=int(data["feature"]),
        threshold=float(data["threshold"]),
        left=_node_from_dict(data["left"]),
        right=_node_from_dict(data["right"]),
    )


def model_to_text(model: TrainedModel) -> str:
    doc = {
        "format": _FORMAT,
        "n_features": model.n_features,
        "base_margin": model.base_margin,
        "feature_names": model.feature_names,
        "config": asdict(model.config),
        "trees": [_node_to_dict(t) for t in model.trees],
    }
    return json.dumps(doc, indent=1)


def model_from_text(text: str) -> TrainedModel:
    doc = json.loads(text)
    if doc.get("format") != _FORMAT:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    return TrainedModel(
        trees=[_node_from_dict(t) for t in doc["trees"]],
        config=GBDTConfig(**doc["config"]),
        n_features=int(doc["n_features"]),
        base_margin=float(doc["base_margin"]),
        feature_names=doc["feature_names"],
    )


def save_model(model: TrainedModel, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_text(model))


def load_model(path: str) -> TrainedModel:
    with open(path) as fh:
        return model_from_text(fh.read())
