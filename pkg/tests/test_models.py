"""Tree, forest, boosting, and linear model behaviour."""

import numpy as np
import pytest

from promoforecast.domain import ModelKind
from promoforecast.models import (
    BoostingConfig,
    ForestConfig,
    GradientBoostingModel,
    LinearModel,
    RandomForestModel,
    RegressionTree,
    evaluate,
    train_model,
)
from promoforecast.models.trees import build_tree


def toy_data(seed=0, n=200, d=5):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    y = 3.0 * X[:, 0] + 0.05 * rng.standard_normal(n)
    return X, y


def hand_tree(feature=0, threshold=1.0, left_value=2.0, right_value=8.0):
    """Depth-1 tree: x[feature] <= threshold goes left."""
    return RegressionTree(
        feature=np.array([feature, -1, -1], dtype=np.int32),
        threshold=np.array([threshold, 0.0, 0.0]),
        left=np.array([1, -1, -1], dtype=np.int32),
        right=np.array([2, -1, -1], dtype=np.int32),
        value=np.array([5.0, left_value, right_value]),
        max_depth=1,
    )


class TestRegressionTree:
    def test_single_leaf(self):
        tree = RegressionTree(
            feature=np.array([-1], dtype=np.int32),
            threshold=np.array([0.0]),
            left=np.array([-1], dtype=np.int32),
            right=np.array([-1], dtype=np.int32),
            value=np.array([5.0]),
            max_depth=0,
        )
        assert tree.predict_row(np.array([1.0, 2.0])) == 5.0
        np.testing.assert_array_equal(tree.predict_many(np.zeros((3, 2))), [5.0] * 3)

    def test_hand_built_depth_one(self):
        tree = hand_tree()
        assert tree.predict_row(np.array([0.0])) == 2.0
        assert tree.predict_row(np.array([1.0])) == 2.0  # boundary goes left
        assert tree.predict_row(np.array([1.5])) == 8.0

    def test_batch_matches_rowwise(self):
        rng = np.random.default_rng(1)
        X, y = toy_data(1)
        tree = build_tree(X, y, np.arange(len(X), dtype=np.int64), 6, 1, X.shape[1], rng)
        batch = tree.predict_many(X)
        rows = np.array([tree.predict_row(x) for x in X])
        np.testing.assert_array_equal(batch, rows)

    def test_leaf_values_are_node_means(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([1.0, 3.0, 10.0, 14.0])
        tree = build_tree(X, y, np.arange(4, dtype=np.int64), 1, 1, 1, None)
        # Root splits at the best boundary; each leaf predicts its mean.
        preds = set(tree.predict_many(X).tolist())
        assert preds == {2.0, 12.0}

    def test_depth_zero_is_global_mean(self):
        X, y = toy_data(2)
        tree = build_tree(X, y, np.arange(len(X), dtype=np.int64), 0, 1, X.shape[1], None)
        np.testing.assert_array_equal(tree.predict_many(X), np.full(len(X), y.mean()))

    def test_payload_round_trip_is_exact(self):
        X, y = toy_data(3)
        tree = build_tree(X, y, np.arange(len(X), dtype=np.int64), 8, 1, X.shape[1], None)
        clone = RegressionTree.from_payload(tree.to_payload())
        np.testing.assert_array_equal(tree.predict_many(X), clone.predict_many(X))
        np.testing.assert_array_equal(tree.threshold, clone.threshold)


class TestRandomForest:
    def test_constant_target(self):
        X, _ = toy_data(4, n=50)
        y = np.full(50, 7.0)
        model = RandomForestModel.train(X, y, ForestConfig(n_trees=10), "fp")
        np.testing.assert_allclose(model.predict_many(X), 7.0, atol=1e-6)

    def test_linear_signal_recovery(self):
        X, y = toy_data(5)
        model = RandomForestModel.train(X, y, ForestConfig(), "fp")
        rmse = evaluate(y, model.predict_many(X)).rmse
        assert rmse < 0.10 * y.std()

    def test_training_is_deterministic(self):
        X, y = toy_data(6)
        a = RandomForestModel.train(X, y, ForestConfig(n_trees=20), "fp")
        b = RandomForestModel.train(X, y, ForestConfig(n_trees=20), "fp")
        for ta, tb in zip(a.trees, b.trees):
            np.testing.assert_array_equal(ta.feature, tb.feature)
            np.testing.assert_array_equal(ta.threshold, tb.threshold)
            np.testing.assert_array_equal(ta.value, tb.value)

    def test_seed_changes_trees(self):
        X, y = toy_data(7)
        a = RandomForestModel.train(X, y, ForestConfig(n_trees=5, seed=0), "fp")
        b = RandomForestModel.train(X, y, ForestConfig(n_trees=5, seed=1), "fp")
        assert any(
            not np.array_equal(ta.threshold, tb.threshold)
            for ta, tb in zip(a.trees, b.trees)
        )

    def test_prediction_is_mean_of_trees(self):
        X, y = toy_data(8, n=60)
        model = RandomForestModel.train(X, y, ForestConfig(n_trees=7), "fp")
        x = X[3]
        per_tree = [t.predict_row(x) for t in model.trees]
        assert model.predict_row(x) == pytest.approx(np.mean(per_tree), rel=1e-12)

    def test_tree_order_does_not_matter(self):
        X, y = toy_data(9, n=60)
        model = RandomForestModel.train(X, y, ForestConfig(n_trees=9), "fp")
        preds = model.predict_many(X[:5])
        model.trees.reverse()
        np.testing.assert_allclose(model.predict_many(X[:5]), preds, rtol=1e-12)

    def test_constant_feature_never_splits(self):
        X, y = toy_data(10)
        X = np.column_stack([X, np.full(len(X), 3.3)])
        model = RandomForestModel.train(X, y, ForestConfig(n_trees=30), "fp")
        counts = model.split_counts(X.shape[1])
        assert counts[-1] == 0

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            RandomForestModel.train(np.zeros((3, 2)), np.zeros(3), ForestConfig(), "fp")

    def test_non_finite_rejected(self):
        X, y = toy_data(11, n=20)
        X[0, 0] = np.nan
        with pytest.raises(ValueError):
            RandomForestModel.train(X, y, ForestConfig(), "fp")

    def test_payload_round_trip(self):
        X, y = toy_data(12, n=80)
        model = RandomForestModel.train(X, y, ForestConfig(n_trees=6), "fp")
        clone = RandomForestModel.from_payload(model.to_payload(), "fp")
        np.testing.assert_array_equal(model.predict_many(X), clone.predict_many(X))
        assert clone.config == model.config


class TestGradientBoosting:
    def test_constant_target(self):
        X, _ = toy_data(13, n=40)
        y = np.full(40, 2.5)
        model = GradientBoostingModel.train(X, y, BoostingConfig(n_trees=20), "fp")
        np.testing.assert_allclose(model.predict_many(X), 2.5, atol=1e-9)

    def test_training_loss_never_increases(self):
        X, y = toy_data(14)
        model = GradientBoostingModel.train(X, y, BoostingConfig(n_trees=80), "fp")
        losses = model.training_loss
        assert len(losses) == 81  # before any tree, then after each
        for before, after in zip(losses, losses[1:]):
            assert after <= before + 1e-12

    def test_outpredicts_its_own_base(self):
        X, y = toy_data(15)
        model = GradientBoostingModel.train(X, y, BoostingConfig(), "fp")
        rmse = evaluate(y, model.predict_many(X)).rmse
        base_rmse = evaluate(y, np.full(len(y), model.base)).rmse
        assert rmse < 0.2 * base_rmse

    def test_prediction_formula(self):
        X, y = toy_data(16, n=50)
        model = GradientBoostingModel.train(X, y, BoostingConfig(n_trees=12), "fp")
        x = X[7]
        manual = model.base + model.config.shrinkage * sum(
            t.predict_row(x) for t in model.trees
        )
        assert model.predict_row(x) == pytest.approx(manual, rel=1e-12)

    def test_depth_one_config_builds_stumps(self):
        X, y = toy_data(17, n=60)
        model = GradientBoostingModel.train(
            X, y, BoostingConfig(n_trees=10, max_depth=1), "fp"
        )
        for tree in model.trees:
            assert tree.n_nodes <= 3

    def test_payload_round_trip(self):
        X, y = toy_data(18, n=60)
        model = GradientBoostingModel.train(X, y, BoostingConfig(n_trees=15), "fp")
        clone = GradientBoostingModel.from_payload(model.to_payload(), "fp")
        np.testing.assert_array_equal(model.predict_many(X), clone.predict_many(X))


class TestLinearModel:
    def test_exact_on_linear_data(self):
        rng = np.random.default_rng(19)
        X = rng.standard_normal((100, 4))
        y = X @ np.array([1.0, -2.0, 0.5, 3.0]) + 7.0
        model = LinearModel.train(X, y, "fp")
        np.testing.assert_allclose(model.predict_many(X), y, atol=1e-8)
        assert model.intercept == pytest.approx(7.0, abs=1e-8)


class TestTrainDispatch:
    def test_kinds_map_to_models(self):
        X, y = toy_data(20, n=60)
        assert isinstance(
            train_model(ModelKind.RANDOM_FOREST, X, y, ForestConfig(n_trees=3)),
            RandomForestModel,
        )
        assert isinstance(
            train_model(ModelKind.GRADIENT_BOOSTING, X, y, BoostingConfig(n_trees=3)),
            GradientBoostingModel,
        )

    def test_string_kind_accepted(self):
        X, y = toy_data(21, n=60)
        model = train_model("RandomForest", X, y, ForestConfig(n_trees=3))
        assert model.kind is ModelKind.RANDOM_FOREST


class TestEvaluate:
    def test_perfect_predictions(self):
        m = evaluate([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert m.rmse == 0.0
        assert m.mape == 0.0

    def test_symmetric_errors(self):
        m = evaluate([100.0, 100.0], [110.0, 90.0])
        assert m.rmse == 10.0
        assert m.mape == 10.0

    def test_zero_rows_skipped_in_mape(self):
        m = evaluate([0.0, 10.0], [5.0, 10.0])
        assert m.rmse == pytest.approx(np.sqrt(12.5))
        assert m.mape == 0.0

    def test_all_zero_actuals(self):
        m = evaluate([0.0, 0.0], [1.0, 2.0])
        assert m.mape is None
        assert m.rmse == pytest.approx(np.sqrt(2.5))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            evaluate([1.0], [1.0, 2.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            evaluate([], [])
