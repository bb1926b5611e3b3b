"""Forecast accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricPair:
    rmse: float
    mape: float | None  # None when every actual value is zero

    def as_dict(self) -> dict:
        return {"rmse": self.rmse, "mape": self.mape}


def evaluate(y_true: np.ndarray, y_pred: np.ndarray) -> MetricPair:
    """RMSE plus mean absolute percentage error.

    Days with zero actual sales are skipped in the MAPE average since a
    relative error against zero is undefined; if the whole series is zero
    the MAPE is reported as None.
    """
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ValueError("cannot evaluate empty series")
    err = y_pred - y_true
    rmse = float(np.sqrt(np.mean(err * err)))
    nonzero = y_true != 0
    if not nonzero.any():
        return MetricPair(rmse=rmse, mape=None)
    mape = float(np.mean(np.abs(err[nonzero]) / np.abs(y_true[nonzero])) * 100.0)
    return MetricPair(rmse=rmse, mape=mape)
