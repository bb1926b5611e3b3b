"""NumPy implementation of the regression-tree split search.

This is the fallback backend; the Cython extension (``_split_cy``) computes
bit-identical results. Both scan candidate positions in stable-sorted order
with sequential prefix sums, so tie-breaking and rounding agree and either
backend grows the same trees.
"""

from __future__ import annotations

import numpy as np

NO_SPLIT = (-1, 0.0, 0.0)


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    features: np.ndarray,
    min_leaf: int,
) -> tuple[int, float, float]:
    """Best (feature, threshold, gain) for one node.

    Score of a candidate split is sum_l^2/n_l + sum_r^2/n_r (maximizing it
    minimizes the children's SSE); gain is relative to the unsplit node.
    Splits send ``x <= threshold`` left, with the threshold equal to the
    largest left-hand value. Returns feature -1 when no valid split exists.
    """
    n = int(rows.shape[0])
    if n < 2 * min_leaf:
        return NO_SPLIT

    y_node = y[rows]
    # Sequential (cumsum) total so the Cython backend's running sum matches.
    total = float(np.cumsum(y_node)[-1])
    parent_score = total * total / n

    counts_l = np.arange(min_leaf, n - min_leaf + 1, dtype=np.float64)
    counts_r = n - counts_l

    best_feat = -1
    best_thresh = 0.0
    best_score = -np.inf
    for f in features:
        f = int(f)
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        xs = vals[order]
        if xs[0] == xs[n - 1]:
            continue
        cum = np.cumsum(y_node[order])
        ls = cum[min_leaf - 1 : n - min_leaf]
        rs = total - ls
        score = ls * ls / counts_l + rs * rs / counts_r
        valid = xs[min_leaf - 1 : n - min_leaf] < xs[min_leaf : n - min_leaf + 1]
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        j = int(np.argmax(score))
        if score[j] > best_score:
            best_score = float(score[j])
            best_feat = f
            best_thresh = float(xs[min_leaf - 1 + j])

    if best_feat < 0:
        return NO_SPLIT
    return best_feat, best_thresh, best_score - parent_score
