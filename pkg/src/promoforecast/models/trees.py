"""Flat-array regression trees grown with the split-search kernel.

Split semantics: rows with ``x[feature] <= threshold`` go left, and the
threshold stored is the largest left-hand training value, which keeps the
partition exactly consistent with the kernel's candidate counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._kernels import best_split

# Gains at or below this are noise from a pure node; do not split.
MIN_GAIN = 1e-12


@dataclass
class RegressionTree:
    feature: np.ndarray  # int32, -1 for leaves
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    value: np.ndarray  # float64, node mean
    max_depth: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty(len(X), dtype=np.float64)
        stack: list[tuple[int, np.ndarray]] = [(0, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            f = int(self.feature[node])
            if f < 0:
                out[idx] = self.value[node]
                continue
            mask = X[idx, f] <= self.threshold[node]
            stack.append((int(self.left[node]), idx[mask]))
            stack.append((int(self.right[node]), idx[~mask]))
        return out

    def predict_row(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = int(self.left[node])
            else:
                node = int(self.right[node])
        return float(self.value[node])

    def split_counts(self, n_features: int) -> np.ndarray:
        """How often each feature is used as a split (invariant checks)."""
        counts = np.zeros(n_features, dtype=np.int64)
        for f in self.feature:
            if f >= 0:
                counts[f] += 1
        return counts

    def to_payload(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RegressionTree":
        return cls(
            feature=np.asarray(payload["feature"], dtype=np.int32),
            threshold=np.asarray(payload["threshold"], dtype=np.float64),
            left=np.asarray(payload["left"], dtype=np.int32),
            right=np.asarray(payload["right"], dtype=np.int32),
            value=np.asarray(payload["value"], dtype=np.float64),
            max_depth=int(payload["max_depth"]),
        )


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
    min_leaf: int,
    max_features: int,
    rng: np.random.Generator | None,
) -> RegressionTree:
    """Grow one tree depth-first (left before right), so any randomness is
    consumed in a fixed order and training is reproducible.

    ``max_features`` < X.shape[1] samples a fresh feature subset per split
    (requires ``rng``); otherwise all features are candidates.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    d = X.shape[1]
    all_features = np.arange(d, dtype=np.int64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def grow(node_rows: np.ndarray, depth: int) -> int:
        idx = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(np.mean(y[node_rows])))

        if depth >= max_depth or node_rows.size < 2 * min_leaf:
            return idx
        if max_features < d:
            cand = rng.choice(d, size=max_features, replace=False).astype(np.int64)
        else:
            cand = all_features
        f, thr, gain = best_split(X, y, node_rows, cand, min_leaf)
        if f < 0 or gain <= MIN_GAIN:
            return idx

        mask = X[node_rows, f] <= thr
        feature[idx] = f
        threshold[idx] = thr
        left[idx] = grow(node_rows[mask], depth + 1)
        right[idx] = grow(node_rows[~mask], depth + 1)
        return idx

    grow(np.ascontiguousarray(rows, dtype=np.int64), 0)
    return RegressionTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
        max_depth=max_depth,
    )
