"""Exact group-level Shapley attribution.

The five feature groups are the players. The value of a coalition S is the
mean prediction over a background sample with the slots of every group in S
taken from the instance and the rest left at background values
(interventional marginals). With five players all 32 coalitions are
enumerated, so the attribution is exact rather than sampled.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Mapping, Sequence

import numpy as np

Predictor = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Background:
    """Reference rows the marginal expectations are taken over."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError("background needs at least one feature row")
        object.__setattr__(self, "rows", rows)

    @property
    def n_slots(self) -> int:
        return self.rows.shape[1]

    @property
    def means(self) -> np.ndarray:
        return self.rows.mean(axis=0)


def make_background(X: np.ndarray, size: int = 64, seed: int = 0) -> Background:
    """Samples up to `size` training rows, without replacement, seeded."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("background needs at least one feature row")
    if X.shape[0] <= size:
        return Background(X.copy())
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(X.shape[0], size=size, replace=False))
    return Background(X[picks])


@dataclass(frozen=True)
class Attribution:
    """Per-group contributions for one prediction."""

    phi: dict[str, float]
    baseline: float
    prediction: float

    def normalized(self) -> dict[str, float]:
        """Signed contributions rescaled so the absolute values sum to 1."""
        total = sum(abs(v) for v in self.phi.values())
        if total == 0.0:
            return {name: 0.0 for name in self.phi}
        return {name: v / total for name, v in self.phi.items()}


def _as_predictor(model) -> Predictor:
    if callable(model):
        return model
    return model.predict_many


def _check_groups(groups: Mapping[str, Sequence[int]], n_slots: int) -> list[np.ndarray]:
    """Groups must partition the slot indices exactly."""
    seen = np.zeros(n_slots, dtype=bool)
    slot_arrays = []
    for name, slots in groups.items():
        idx = np.asarray(list(slots), dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= n_slots):
            raise ValueError(f"group {name!r} references slots outside the layout")
        if seen[idx].any():
            raise ValueError(f"group {name!r} overlaps another group")
        seen[idx] = True
        slot_arrays.append(idx)
    if not seen.all():
        raise ValueError("groups do not cover every feature slot")
    return slot_arrays


def coalition_values(
    model,
    x: np.ndarray,
    background: Background,
    groups: Mapping[str, Sequence[int]],
) -> np.ndarray:
    """Value of every coalition, indexed by bitmask over the group order."""
    predict = _as_predictor(model)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (background.n_slots,):
        raise ValueError(
            f"instance has {x.shape} slots, background has {background.n_slots}"
        )
    slot_arrays = _check_groups(groups, background.n_slots)
    n_groups = len(slot_arrays)
    n_masks = 1 << n_groups
    m = background.rows.shape[0]

    stacked = np.tile(background.rows, (n_masks, 1))
    for mask in range(n_masks):
        block = stacked[mask * m : (mask + 1) * m]
        for g in range(n_groups):
            if mask & (1 << g):
                block[:, slot_arrays[g]] = x[slot_arrays[g]]
    preds = np.asarray(predict(stacked), dtype=np.float64)
    return preds.reshape(n_masks, m).mean(axis=1)


def shapley_groups(
    model,
    x: np.ndarray,
    background: Background,
    groups: Mapping[str, Sequence[int]],
) -> Attribution:
    """Exact Shapley contribution of each group to the prediction at x.

    Efficiency holds by construction: the contributions plus the baseline
    (value of the empty coalition) sum to the model's prediction at x.
    """
    values = coalition_values(model, x, background, groups)
    names = list(groups)
    n_groups = len(names)
    full = (1 << n_groups) - 1

    weights = [
        factorial(s) * factorial(n_groups - s - 1) / factorial(n_groups)
        for s in range(n_groups)
    ]
    phi = {}
    for g, name in enumerate(names):
        bit = 1 << g
        acc = 0.0
        for mask in range(full + 1):
            if mask & bit:
                continue
            acc += weights[bin(mask).count("1")] * (values[mask | bit] - values[mask])
        # acc picks up np.float64 from the coalition values; keep the
        # published mapping plain-float.
        phi[name] = float(acc)

    predict = _as_predictor(model)
    prediction = float(np.asarray(predict(x[None, :]), dtype=np.float64)[0])
    return Attribution(phi=phi, baseline=float(values[0]), prediction=prediction)


def attribute_horizon(
    model,
    feature_rows: np.ndarray,
    background: Background,
    groups: Mapping[str, Sequence[int]],
) -> list[Attribution]:
    """Attribution for every row of a forecast horizon."""
    feature_rows = np.atleast_2d(np.asarray(feature_rows, dtype=np.float64))
    return [shapley_groups(model, row, background, groups) for row in feature_rows]
