"""Bagged-forest and shrinkage-boosting regressors over RegressionTree.

Both are seeded end to end: per-tree RNGs come from a spawned SeedSequence
schedule, so retraining with the same (data, config, seed) reproduces the
same trees, and forest trees could be grown in parallel without changing
the result.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..domain import ModelKind
from .trees import RegressionTree, build_tree


def _check_training_inputs(X: np.ndarray, y: np.ndarray, min_samples: int) -> None:
    if len(X) != len(y):
        raise ValueError(f"X and y disagree on length: {len(X)} vs {len(y)}")
    if len(X) < min_samples:
        raise ValueError(f"too few samples: {len(X)} < {min_samples}")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite values")
    if not np.isfinite(y).all():
        raise ValueError("target vector contains non-finite values")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 1
    min_samples: int = 8
    seed: int = 0


@dataclass(frozen=True)
class BoostingConfig:
    n_trees: int = 200
    max_depth: int = 4
    min_leaf: int = 1
    min_samples: int = 8
    shrinkage: float = 0.1
    seed: int = 0


class RandomForestModel:
    """Bootstrap-sampled trees with a fresh sqrt(d) feature subset at every
    split; prediction is the mean across trees."""

    kind = ModelKind.RANDOM_FOREST

    def __init__(self, trees: list[RegressionTree], config: ForestConfig, layout_fingerprint: str):
        self.trees = trees
        self.config = config
        self.layout_fingerprint = layout_fingerprint

    @classmethod
    def train(
        cls, X: np.ndarray, y: np.ndarray, config: ForestConfig, layout_fingerprint: str = ""
    ) -> "RandomForestModel":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        _check_training_inputs(X, y, config.min_samples)
        n, d = X.shape
        max_features = max(1, int(np.ceil(np.sqrt(d))))
        seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
        trees = []
        for seq in seeds:
            rng = np.random.default_rng(seq)
            rows = rng.integers(0, n, size=n).astype(np.int64)
            trees.append(
                build_tree(X, y, rows, config.max_depth, config.min_leaf, max_features, rng)
            )
        return cls(trees, config, layout_fingerprint)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(len(X), dtype=np.float64)
        for tree in self.trees:
            acc += tree.predict_many(X)
        return acc / len(self.trees)

    def predict_row(self, x: np.ndarray) -> float:
        return float(np.mean([t.predict_row(x) for t in self.trees]))

    def split_counts(self, n_features: int) -> np.ndarray:
        counts = np.zeros(n_features, dtype=np.int64)
        for tree in self.trees:
            counts += tree.split_counts(n_features)
        return counts

    def to_payload(self) -> dict:
        return {
            "config": asdict(self.config),
            "trees": [t.to_payload() for t in self.trees],
        }

    @classmethod
    def from_payload(cls, payload: dict, layout_fingerprint: str) -> "RandomForestModel":
        return cls(
            [RegressionTree.from_payload(p) for p in payload["trees"]],
            ForestConfig(**payload["config"]),
            layout_fingerprint,
        )


class GradientBoostingModel:
    """Least-squares boosting: depth-limited trees fit to residuals, each
    scaled by the shrinkage rate, on top of the mean baseline."""

    kind = ModelKind.GRADIENT_BOOSTING

    def __init__(
        self,
        base: float,
        trees: list[RegressionTree],
        config: BoostingConfig,
        layout_fingerprint: str,
        training_loss: list[float] | None = None,
    ):
        self.base = base
        self.trees = trees
        self.config = config
        self.layout_fingerprint = layout_fingerprint
        self.training_loss = training_loss or []

    @classmethod
    def train(
        cls, X: np.ndarray, y: np.ndarray, config: BoostingConfig, layout_fingerprint: str = ""
    ) -> "GradientBoostingModel":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        _check_training_inputs(X, y, config.min_samples)
        n, d = X.shape
        rows = np.arange(n, dtype=np.int64)
        base = float(np.mean(y))
        residual = y - base
        trees: list[RegressionTree] = []
        loss = [float(np.mean(residual**2))]
        for _ in range(config.n_trees):
            tree = build_tree(X, residual, rows, config.max_depth, config.min_leaf, d, None)
            residual = residual - config.shrinkage * tree.predict_many(X)
            trees.append(tree)
            loss.append(float(np.mean(residual**2)))
        return cls(base, trees, config, layout_fingerprint, loss)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.full(len(X), self.base, dtype=np.float64)
        for tree in self.trees:
            acc += self.config.shrinkage * tree.predict_many(X)
        return acc

    def predict_row(self, x: np.ndarray) -> float:
        total = self.base
        for tree in self.trees:
            total += self.config.shrinkage * tree.predict_row(x)
        return float(total)

    def to_payload(self) -> dict:
        return {
            "config": asdict(self.config),
            "base": self.base,
            "trees": [t.to_payload() for t in self.trees],
            "training_loss": self.training_loss,
        }

    @classmethod
    def from_payload(cls, payload: dict, layout_fingerprint: str) -> "GradientBoostingModel":
        return cls(
            payload["base"],
            [RegressionTree.from_payload(p) for p in payload["trees"]],
            BoostingConfig(**payload["config"]),
            layout_fingerprint,
            payload.get("training_loss", []),
        )


@dataclass
class LinearModel:
    """Closed-form least squares with an intercept; the evaluation CLI's
    baseline row, never served."""

    coef: np.ndarray
    intercept: float
    layout_fingerprint: str = ""
    kind = "Linear"

    @classmethod
    def train(cls, X: np.ndarray, y: np.ndarray, layout_fingerprint: str = "") -> "LinearModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_training_inputs(X, y, 2)
        A = np.hstack([X, np.ones((len(X), 1))])
        sol, *_ = np.linalg.lstsq(A, y, rcond=None)
        return cls(coef=sol[:-1], intercept=float(sol[-1]), layout_fingerprint=layout_fingerprint)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.coef + self.intercept

    def predict_row(self, x: np.ndarray) -> float:
        return float(np.dot(x, self.coef) + self.intercept)

    def to_payload(self) -> dict:
        return {"coef": self.coef.tolist(), "intercept": self.intercept}

    @classmethod
    def from_payload(cls, payload: dict, layout_fingerprint: str) -> "LinearModel":
        return cls(
            np.asarray(payload["coef"], dtype=np.float64),
            float(payload["intercept"]),
            layout_fingerprint,
        )
