"""Forecasting models: random forest, gradient boosting, MLP, linear baseline."""

from __future__ import annotations

import numpy as np

from ..domain import ModelKind
from .ensembles import (
    BoostingConfig,
    ForestConfig,
    GradientBoostingModel,
    LinearModel,
    RandomForestModel,
)
from .metrics import MetricPair, evaluate
from .mlp import MLPConfig, MLPModel
from .trees import RegressionTree, build_tree

ForecastModel = RandomForestModel | GradientBoostingModel | MLPModel

_DEFAULT_CONFIGS = {
    ModelKind.RANDOM_FOREST: ForestConfig,
    ModelKind.GRADIENT_BOOSTING: BoostingConfig,
    ModelKind.MLP: MLPConfig,
}

_TRAINERS = {
    ModelKind.RANDOM_FOREST: RandomForestModel.train,
    ModelKind.GRADIENT_BOOSTING: GradientBoostingModel.train,
    ModelKind.MLP: MLPModel.train,
}


def train_model(
    kind: ModelKind,
    X: np.ndarray,
    y: np.ndarray,
    config=None,
    layout_fingerprint: str = "",
) -> ForecastModel:
    """Trains a model of the requested kind, using default settings if no
    config is given."""
    kind = ModelKind(kind)
    if config is None:
        config = _DEFAULT_CONFIGS[kind]()
    return _TRAINERS[kind](X, y, config, layout_fingerprint)


def mlp_gradient(model: MLPModel, x: np.ndarray, y: float) -> np.ndarray:
    """Analytic gradient of the squared loss at one instance, flattened over
    all weights and biases."""
    if not isinstance(model, MLPModel):
        raise TypeError(f"expected an MLP model, got {type(model).__name__}")
    return model.gradient(x, y)


__all__ = [
    "BoostingConfig",
    "ForecastModel",
    "ForestConfig",
    "GradientBoostingModel",
    "LinearModel",
    "MetricPair",
    "MLPConfig",
    "MLPModel",
    "ModelKind",
    "RandomForestModel",
    "RegressionTree",
    "build_tree",
    "evaluate",
    "mlp_gradient",
    "train_model",
]
