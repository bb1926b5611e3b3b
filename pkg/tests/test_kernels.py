"""Split-search kernel: correctness against a brute-force oracle and
bit-identical behaviour across the compiled and pure-python backends."""

import os
import subprocess
import sys

import numpy as np
import pytest

from promoforecast._kernels import ACTIVE_BACKEND
from promoforecast._kernels._split_py import best_split as py_split

try:
    from promoforecast._kernels._split_cy import best_split as cy_split
except ImportError:  # pragma: no cover - compiled backend absent
    cy_split = None

needs_compiled = pytest.mark.skipif(cy_split is None, reason="compiled kernel not built")


def brute_force_best(X, y, rows, features, min_leaf):
    """Exhaustive split search: every feature, every boundary between
    distinct sorted values, first-best wins on strict improvement."""
    n = len(rows)
    if n < 2 * min_leaf:
        return (-1, 0.0, 0.0)
    ys = [float(y[r]) for r in rows]
    total = 0.0
    for v in ys:
        total += v
    parent = total * total / n
    best = (-1, 0.0, -float("inf"))
    for f in features:
        pairs = sorted(
            ((float(X[r, f]), float(y[r])) for r in rows), key=lambda p: p[0]
        )
        left_sum = 0.0
        for i in range(n - 1):
            left_sum += pairs[i][1]
            n_l = i + 1
            if n_l < min_leaf or n - n_l < min_leaf:
                continue
            if pairs[i][0] == pairs[i + 1][0]:
                continue
            right_sum = total - left_sum
            score = left_sum * left_sum / n_l + right_sum * right_sum / (n - n_l)
            if score > best[2]:
                best = (int(f), pairs[i][0], score)
    if best[0] < 0:
        return (-1, 0.0, 0.0)
    return (best[0], best[1], best[2] - parent)


def random_case(rng):
    n = int(rng.integers(2, 90))
    d = int(rng.integers(1, 10))
    X = rng.standard_normal((n, d))
    for j in range(d):
        if rng.random() < 0.4:  # heavy ties stress the boundary rule
            X[:, j] = rng.integers(0, 4, size=n).astype(float)
    y = rng.standard_normal(n)
    rows = rng.choice(n, size=int(rng.integers(2, n + 1)), replace=True).astype(np.int64)
    feats = np.sort(
        rng.choice(d, size=int(rng.integers(1, d + 1)), replace=False)
    ).astype(np.int64)
    min_leaf = int(rng.integers(1, 4))
    return np.ascontiguousarray(X), np.ascontiguousarray(y), rows, feats, min_leaf


class TestPythonKernel:
    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(101)
        for _ in range(250):
            X, y, rows, feats, min_leaf = random_case(rng)
            got = py_split(X, y, rows, feats, min_leaf)
            want = brute_force_best(X, y, rows, feats, min_leaf)
            assert got[0] == want[0]
            assert got[1] == pytest.approx(want[1], abs=0)
            assert got[2] == pytest.approx(want[2], rel=1e-9, abs=1e-9)

    def test_too_few_rows(self):
        X = np.zeros((3, 2))
        y = np.ones(3)
        rows = np.array([0, 1, 2], dtype=np.int64)
        feats = np.array([0, 1], dtype=np.int64)
        assert py_split(X, y, rows, feats, 2) == (-1, 0.0, 0.0)

    def test_constant_features_cannot_split(self):
        X = np.ones((10, 3))
        y = np.arange(10, dtype=np.float64)
        rows = np.arange(10, dtype=np.int64)
        feats = np.arange(3, dtype=np.int64)
        assert py_split(X, y, rows, feats, 1) == (-1, 0.0, 0.0)

    def test_constant_target_yields_zero_gain(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((20, 2))
        y = np.full(20, 3.5)
        rows = np.arange(20, dtype=np.int64)
        feats = np.arange(2, dtype=np.int64)
        f, _, gain = py_split(X, y, rows, feats, 1)
        assert gain == pytest.approx(0.0, abs=1e-9)

    def test_perfect_separation(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0.0, 0.0, 10.0, 10.0])
        rows = np.arange(4, dtype=np.int64)
        feats = np.array([0], dtype=np.int64)
        f, thresh, gain = py_split(X, y, rows, feats, 1)
        assert f == 0
        assert thresh == 1.0
        assert gain == pytest.approx(100.0)

    def test_threshold_is_a_left_side_value(self):
        rng = np.random.default_rng(33)
        for _ in range(60):
            X, y, rows, feats, min_leaf = random_case(rng)
            f, thresh, gain = py_split(X, y, rows, feats, min_leaf)
            if f < 0:
                continue
            vals = X[rows, f]
            assert thresh in vals
            n_left = int((vals <= thresh).sum())
            assert min_leaf <= n_left <= len(rows) - min_leaf


@needs_compiled
class TestBackendEquivalence:
    def test_bit_identical_results(self):
        rng = np.random.default_rng(202)
        for _ in range(400):
            X, y, rows, feats, min_leaf = random_case(rng)
            a = py_split(X, y, rows, feats, min_leaf)
            b = cy_split(X, y, rows, feats, min_leaf)
            assert a[0] == b[0]
            # Bitwise equality, not approximate: the two backends must be
            # interchangeable without retraining.
            assert a[1] == b[1]
            assert a[2] == b[2]

    def test_degenerate_cases_agree(self):
        X = np.ones((6, 2))
        y = np.arange(6, dtype=np.float64)
        rows = np.arange(6, dtype=np.int64)
        feats = np.arange(2, dtype=np.int64)
        assert py_split(X, y, rows, feats, 1) == cy_split(X, y, rows, feats, 1)
        assert py_split(X, y, rows, feats, 4) == cy_split(X, y, rows, feats, 4)


class TestBackendSelection:
    def _backend_under(self, env_value):
        env = dict(os.environ)
        if env_value is None:
            env.pop("PROMOFORECAST_KERNEL", None)
        else:
            env["PROMOFORECAST_KERNEL"] = env_value
        out = subprocess.run(
            [sys.executable, "-c", "from promoforecast._kernels import ACTIVE_BACKEND; print(ACTIVE_BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
        )
        return out

    def test_python_can_be_forced(self):
        out = self._backend_under("python")
        assert out.returncode == 0
        assert out.stdout.strip() == "python"

    def test_auto_is_default(self):
        out = self._backend_under(None)
        assert out.returncode == 0
        assert out.stdout.strip() in {"cython", "python"}

    def test_unknown_backend_rejected(self):
        out = self._backend_under("fortran")
        assert out.returncode != 0
        assert "fortran" in out.stderr

    def test_active_backend_is_reported(self):
        assert ACTIVE_BACKEND in {"cython", "python"}
