"""Timing comparison of the two split-search backends.

Regression-tree training spends nearly all its time inside ``best_split``,
so that is the hot loop shipped as a compiled extension with a NumPy
fallback. This script times both backends on identical node workloads,
confirms they return the same answer, then times a full forest training
with each. Run from anywhere once the package is installed:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from promoforecast._kernels import _split_py
from promoforecast.models import ForestConfig, RandomForestModel
from promoforecast.models import trees
from promoforecast.pipeline import ForecastContext
from promoforecast.synthetic import SyntheticConfig, generate_synthetic

try:
    from promoforecast._kernels import _split_cy
except ImportError:
    _split_cy = None

NODE_SIZES = (200, 1000, 5000)
N_FEATURES = 54


def node_workload(n_rows: int, seed: int):
    """A root-node split problem: every row, every feature a candidate."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_rows, N_FEATURES))
    y = X[:, 3] * 2.0 + X[:, 17] + rng.standard_normal(n_rows) * 0.5
    rows = np.arange(n_rows, dtype=np.intp)
    features = np.arange(N_FEATURES, dtype=np.intp)
    return X, y, rows, features


def time_per_call(fn, args, repeats: int) -> float:
    """Median seconds per call over `repeats` timed calls (after one warmup)."""
    fn(*args)
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - started)
    samples.sort()
    return samples[len(samples) // 2]


def bench_node_splits(repeats: int) -> None:
    print(f"node split search ({N_FEATURES} features, min_leaf 1)")
    header = f"{'rows':>7} {'python':>12}"
    if _split_cy is not None:
        header += f" {'cython':>12} {'speedup':>9}"
    print(header)
    for n_rows in NODE_SIZES:
        args = (*node_workload(n_rows, seed=n_rows), 1)
        py = time_per_call(_split_py.best_split, args, repeats)
        line = f"{n_rows:>7} {py * 1e3:>9.2f} ms"
        if _split_cy is not None:
            assert _split_cy.best_split(*args) == _split_py.best_split(*args), (
                "backends disagree on the same node"
            )
            cy = time_per_call(_split_cy.best_split, args, repeats)
            line += f" {cy * 1e3:>9.2f} ms {py / cy:>8.1f}x"
        print(line)


def train_with_backend(backend, X, y, config) -> tuple[float, np.ndarray]:
    """Forest training wall time and its predictions under one backend.

    ``trees`` binds ``best_split`` at import, so the benchmark swaps the
    bound name rather than re-importing with a different environment.
    """
    original = trees.best_split
    trees.best_split = backend
    try:
        started = time.perf_counter()
        model = RandomForestModel.train(X, y, config)
        elapsed = time.perf_counter() - started
        return elapsed, model.predict_many(X[:256])
    finally:
        trees.best_split = original


def bench_forest(n_trees: int) -> None:
    syn = generate_synthetic(SyntheticConfig(n_products=10, n_days=200, seed=5))
    rows = ForecastContext(syn.dataset()).training_rows()
    config = ForestConfig(n_trees=n_trees)
    print()
    print(
        f"forest training ({len(rows)} rows x {rows.X.shape[1]} features, "
        f"{n_trees} trees)"
    )
    py_secs, py_preds = train_with_backend(_split_py.best_split, rows.X, rows.y, config)
    print(f"  python {py_secs:>8.2f} s")
    if _split_cy is not None:
        cy_secs, cy_preds = train_with_backend(
            _split_cy.best_split, rows.X, rows.y, config
        )
        print(f"  cython {cy_secs:>8.2f} s   ({py_secs / cy_secs:.1f}x faster)")
        matched = np.array_equal(py_preds, cy_preds)
        print(f"  predictions from both backends identical: {matched}")
        if not matched:
            raise SystemExit("backend mismatch: the fallback is not equivalent")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--repeats", type=int, default=9, help="timed calls per node size (default 9)"
    )
    parser.add_argument(
        "--trees", type=int, default=20, help="forest size for the end-to-end timing"
    )
    args = parser.parse_args(argv)

    if _split_cy is None:
        print("compiled extension not importable; timing the NumPy backend only")
    else:
        print("compiled extension found; comparing both backends")
    print()
    bench_node_splits(args.repeats)
    bench_forest(args.trees)
    return 0


if __name__ == "__main__":
    sys.exit(main())
