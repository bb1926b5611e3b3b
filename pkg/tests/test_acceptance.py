"""Release gate: every quantitative promise the package makes, one test each.

Each test states its tolerance and, where a budget is promised, asserts its
own runtime. The heavyweight fixtures (a 20-product, 500-day synthetic
catalog with a trained forest) are shared between the recovery and what-if
tests; their build time is charged to the recovery budget.
"""

import functools
import math
import random
import time
from collections import defaultdict
from datetime import date, timedelta
from types import SimpleNamespace

import numpy as np
import pytest

from oracles import interventional_coalition_value, shapley_by_permutations
from promoforecast.analytics import (
    ProductStats,
    UndefinedGrowth,
    growth_rate,
    project_products,
    top_competitors,
)
from promoforecast.domain import ModelKind, Product, PromotionKind
from promoforecast.explain import Background, make_background, shapley_groups
from promoforecast.models import (
    BoostingConfig,
    ForestConfig,
    MLPConfig,
    MLPModel,
    RandomForestModel,
    evaluate,
    train_model,
)
from promoforecast.pipeline import ForecastContext, split_chronological
from promoforecast.promos import ParsedPromotion, parse_promotion, render_promotion
from promoforecast.synthetic import SyntheticConfig, generate_synthetic
from promoforecast.whatif import EditOp, Scenario, ScenarioEdit, run_scenario

# --- 1. promotion grammar round-trip -----------------------------------------

GOLDEN_FORMS = [
    (
        "$10 Off Orders Over $69",
        ParsedPromotion(PromotionKind.VALUE_DISCOUNT, 10 / 69, 69.0, 0.0),
    ),
    ("20% Off", ParsedPromotion(PromotionKind.PERCENTAGE_DISCOUNT, 0.20, 0.0, 0.0)),
    (
        "30% Off in 4 Hours",
        ParsedPromotion(PromotionKind.FLASH_SALE, 0.30, 0.0, 0.0, flash_hours=4.0),
    ),
    ("100 Loyalty Points Back", ParsedPromotion(PromotionKind.LOYALTY_POINTS, 0.0, 0.0, 100.0)),
    (
        "Free Shipping on Orders Over $99",
        ParsedPromotion(PromotionKind.FREE_SHIPPING, 0.0, 99.0, 1.0),
    ),
    (
        "6 Months Interest-free Installment",
        ParsedPromotion(PromotionKind.INTEREST_FREE_INSTALLMENT, 0.0, 0.0, 6.0),
    ),
]


def _draw_promotion(kind: PromotionKind, rng: random.Random):
    """Random positive parameters for one grammar, plus the exact parse they
    must come back as.

    Money is drawn in whole cents below $10,000 and percents in half-points,
    so the rendered text preserves every digit and the round trip can be
    checked with plain equality.
    """
    if kind is PromotionKind.VALUE_DISCOUNT:
        amount_cents = rng.randint(100, 999_899)
        trigger_cents = rng.randint(amount_cents, 999_999)
        amount, trigger = amount_cents / 100, trigger_cents / 100
        params = {"amount": amount, "trigger": trigger}
        return params, ParsedPromotion(kind, amount / trigger, trigger, 0.0)
    if kind is PromotionKind.PERCENTAGE_DISCOUNT:
        percent = rng.randint(2, 199) / 2
        return {"percent": percent}, ParsedPromotion(kind, percent / 100, 0.0, 0.0)
    if kind is PromotionKind.FLASH_SALE:
        percent = rng.randint(2, 199) / 2
        hours = float(rng.randint(1, 72))
        params = {"percent": percent, "hours": hours}
        return params, ParsedPromotion(kind, percent / 100, 0.0, 0.0, flash_hours=hours)
    if kind is PromotionKind.LOYALTY_POINTS:
        points = float(rng.randint(1, 999_999))
        return {"points": points}, ParsedPromotion(kind, 0.0, 0.0, points)
    if kind is PromotionKind.FREE_SHIPPING:
        trigger = rng.randint(100, 999_999) / 100
        return {"trigger": trigger}, ParsedPromotion(kind, 0.0, trigger, 1.0)
    months = float(rng.randint(1, 36))
    return {"months": months}, ParsedPromotion(kind, 0.0, 0.0, months)


def test_promotion_grammar_round_trip():
    started = time.perf_counter()
    for text, expected in GOLDEN_FORMS:
        assert parse_promotion(text) == expected

    rng = random.Random(20240815)
    kinds = list(PromotionKind)
    for i in range(1000):
        kind = kinds[i % len(kinds)]
        params, expected = _draw_promotion(kind, rng)
        assert parse_promotion(render_promotion(kind, **params)) == expected
    assert time.perf_counter() - started < 5.0


# --- 2. Shapley additivity against the permutation oracle --------------------


def test_shapley_additivity_and_permutation_oracle():
    started = time.perf_counter()
    syn = generate_synthetic(SyntheticConfig(n_products=20, n_days=150, seed=11))
    context = ForecastContext(syn.dataset())
    rows = context.training_rows()
    background = make_background(rows.X, size=16, seed=0)
    groups = context.layout.groups
    names = list(groups)
    slots = [tuple(groups[name]) for name in names]

    # Small configurations keep three trainings plus 300 permutation
    # enumerations (5! orderings each) inside the one-minute budget.
    trainings = [
        (ModelKind.RANDOM_FOREST, ForestConfig(n_trees=15)),
        (ModelKind.GRADIENT_BOOSTING, BoostingConfig(n_trees=40, max_depth=3)),
        (ModelKind.MLP, MLPConfig(epochs=40)),
    ]
    rng = np.random.default_rng(2024)
    for kind, config in trainings:
        model = train_model(kind, rows.X, rows.y, config, context.layout.fingerprint)
        picks = rng.choice(len(rows.X), size=100, replace=False)
        for i in picks:
            x = rows.X[i]
            attribution = shapley_groups(model, x, background, groups)
            gap = abs(
                sum(attribution.phi.values())
                + attribution.baseline
                - attribution.prediction
            )
            assert gap < 1e-6, f"{kind.value}: efficiency gap {gap}"

            value = functools.lru_cache(maxsize=None)(
                interventional_coalition_value(
                    model.predict_row, x, background.rows, slots
                )
            )
            reference = shapley_by_permutations(len(slots), value)
            for name, ref in zip(names, reference):
                assert abs(attribution.phi[name] - ref) <= 1e-9, (
                    f"{kind.value}: {name} diverges from the permutation average"
                )
    assert time.perf_counter() - started < 60.0


# --- 3. null player and symmetry ----------------------------------------------

TOY_GROUPS = {
    name: (slot,)
    for slot, name in enumerate(
        ("descriptions", "price", "temporal", "competitive", "promotion")
    )
}


def test_shapley_null_player_and_symmetry():
    background = Background(np.zeros((4, 5)))

    def constant(X):
        return np.full(np.atleast_2d(X).shape[0], 7.25)

    flat = shapley_groups(constant, np.ones(5), background, TOY_GROUPS)
    assert all(value == 0.0 for value in flat.phi.values())
    assert flat.baseline == 7.25

    def price_only(X):
        return 3.0 * np.atleast_2d(X)[:, 1]

    ignored = shapley_groups(price_only, np.ones(5), background, TOY_GROUPS)
    assert ignored.phi["descriptions"] == 0.0
    assert ignored.phi["promotion"] == 0.0
    assert ignored.phi["price"] != 0.0

    def two_slots(X):
        X = np.atleast_2d(X)
        return X[:, 1] + X[:, 4]

    paired = shapley_groups(two_slots, np.ones(5), background, TOY_GROUPS)
    assert abs(paired.phi["price"] - paired.phi["promotion"]) <= 1e-9
    assert abs(paired.phi["price"] - 1.0) <= 1e-9
    assert abs(paired.phi["promotion"] - 1.0) <= 1e-9


# --- 4. MLP analytic gradient vs finite differences ---------------------------


def test_mlp_gradient_matches_finite_differences():
    h = 1e-5
    worst = 0.0
    shapes = [(5, 4), (6, 3), (4, 4), (3, 5)]
    for seed in range(20):
        n_features = 5 + seed % 4
        model = MLPModel(n_features, MLPConfig(hidden=shapes[seed % len(shapes)], seed=seed))
        rng = np.random.default_rng(seed + 9000)
        flat = rng.standard_normal(model.get_flat_weights().size) * 0.4
        model.set_flat_weights(flat)
        x = rng.standard_normal(n_features)
        y = float(rng.normal(0.0, 2.0))

        analytic = model.gradient(x, y)
        numeric = np.empty_like(analytic)
        for j in range(flat.size):
            probe = flat.copy()
            probe[j] += h
            model.set_flat_weights(probe)
            up = model.loss(x, y)
            probe[j] -= 2 * h
            model.set_flat_weights(probe)
            down = model.loss(x, y)
            numeric[j] = (up - down) / (2 * h)
        model.set_flat_weights(flat)

        scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
        relative = np.linalg.norm(analytic - numeric) / max(scale, 1e-12)
        worst = max(worst, relative)
    assert worst < 1e-4, f"worst relative gradient error {worst}"


# --- 5 & 6. recovery and what-if on a seeded catalog ---------------------------


@pytest.fixture(scope="module")
def catalog():
    """20 products x 500 days with unit promotion lift and 5% noise, split
    chronologically, with a default forest trained on the early 80%."""
    started = time.perf_counter()
    syn = generate_synthetic(
        SyntheticConfig(n_products=20, n_days=500, promo_lift=1.0, noise_sd=5.0, seed=7)
    )
    context = ForecastContext(syn.dataset())
    rows = context.training_rows()
    train_ix, test_ix = split_chronological(rows.dates)
    model = RandomForestModel.train(
        rows.X[train_ix], rows.y[train_ix], ForestConfig(), context.layout.fingerprint
    )
    background = make_background(rows.X[train_ix], size=64, seed=0)
    return SimpleNamespace(
        syn=syn,
        context=context,
        rows=rows,
        train_ix=train_ix,
        test_ix=test_ix,
        model=model,
        background=background,
        setup_seconds=time.perf_counter() - started,
    )


def test_synthetic_recovery_accuracy_and_promotion_signal(catalog):
    started = time.perf_counter()
    rows = catalog.rows
    predictions = catalog.model.predict_many(rows.X[catalog.test_ix])
    pair = evaluate(rows.y[catalog.test_ix], predictions)
    assert pair.mape is not None and pair.mape <= 20.0, f"test MAPE {pair.mape}"

    active_days: dict[str, set[date]] = defaultdict(set)
    for promo in catalog.syn.promotions:
        if not promo.enabled:
            continue
        day = promo.start
        while day <= promo.end:
            active_days[promo.product_id].add(day)
            day += timedelta(days=1)

    promo_rows = [
        i
        for i in catalog.test_ix
        if rows.dates[i] in active_days[rows.product_ids[i]]
    ]
    assert len(promo_rows) >= 50, "test window holds too few promotion days"

    groups = catalog.context.layout.groups
    positive = sum(
        shapley_groups(catalog.model, rows.X[i], catalog.background, groups).phi[
            "promotion"
        ]
        > 0.0
        for i in promo_rows
    )
    share = positive / len(promo_rows)
    assert share >= 0.80, f"promotion group positive on only {share:.0%} of promo days"
    assert catalog.setup_seconds + (time.perf_counter() - started) < 300.0


def test_whatif_zero_edit_identity_and_promotion_removal(catalog):
    context, model, background = catalog.context, catalog.model, catalog.background
    last_observed = {
        series.product_id: series.days[-1].date for series in catalog.syn.sales
    }
    first_day = catalog.syn.config.start

    for product in catalog.syn.products[:3]:
        end = last_observed[product.id]
        scenario = Scenario(product.id, end - timedelta(days=6), end, ModelKind.RANDOM_FOREST)
        run = run_scenario(context, scenario, model, background)
        assert run.edited == run.baseline  # bit-exact, not approximate

    by_product: dict[str, list] = defaultdict(list)
    for promo in catalog.syn.promotions:
        if promo.enabled:
            by_product[promo.product_id].append(promo)

    evaluated = 0
    lowered = 0
    for product_id in sorted(by_product):
        promos = by_product[product_id]
        settled = [
            p
            for p in promos
            if p.start >= first_day + timedelta(days=40)
            and p.end <= last_observed[product_id]
        ]
        if not settled:
            continue
        campaign = max(settled, key=lambda p: (p.end - p.start).days)
        horizon_end = min(campaign.end, campaign.start + timedelta(days=29))
        edits = tuple(
            ScenarioEdit(op=EditOp.DELETE, target=p.id) for p in promos
        )
        scenario = Scenario(
            product_id, campaign.start, horizon_end, ModelKind.RANDOM_FOREST, edits
        )
        run = run_scenario(context, scenario, model, background)
        former_promo_days = [
            i
            for i, day in enumerate(run.baseline.horizon)
            if any(p.start <= day <= p.end for p in promos)
        ]
        assert former_promo_days
        base_mean = np.mean([run.baseline.predictions[i] for i in former_promo_days])
        edited_mean = np.mean([run.edited.predictions[i] for i in former_promo_days])
        evaluated += 1
        lowered += edited_mean < base_mean

    assert evaluated >= 15, "too few products carried a usable campaign"
    share = lowered / evaluated
    assert share >= 0.90, f"removal lowered promo-day sales in only {share:.0%}"


# --- 7. competitor ranking vs brute force -------------------------------------


def _reference_vectors(stats: list[ProductStats]) -> np.ndarray:
    """Robust normalization written out directly: magnitudes centered on the
    median, scaled by the IQR (1 when degenerate), clamped to two IQRs and
    rescaled to [0, 1]; correlations untouched."""
    columns = []
    for dim in ("median", "std", "iqr"):
        values = np.array([getattr(s, dim) for s in stats], dtype=np.float64)
        center = np.median(values)
        q1, q3 = np.quantile(values, [0.25, 0.75])
        scale = (q3 - q1) or 1.0
        columns.append((np.clip((values - center) / scale, -2.0, 2.0) + 2.0) / 4.0)
    for dim in ("corr_price", "corr_promo", "corr_season"):
        columns.append(np.array([getattr(s, dim) for s in stats], dtype=np.float64))
    return np.column_stack(columns)


def test_competitor_ranking_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = 200
        ids = [f"p{i:03d}" for i in range(n)]
        categories = rng.choice(["shoes", "jackets"], size=n, p=[0.7, 0.3])
        products = [
            Product(pid, f"item {pid}", str(categories[i]), "brand", "store", 10.0)
            for i, pid in enumerate(ids)
        ]
        stats = {
            pid: ProductStats(
                median=float(rng.uniform(0, 500)),
                std=float(rng.uniform(0, 100)),
                iqr=float(rng.uniform(0, 150)),
                corr_price=float(rng.uniform(-1, 1)),
                corr_promo=float(rng.uniform(-1, 1)),
                corr_season=float(rng.uniform(-1, 1)),
            )
            for pid in ids
        }
        # Occasionally clone one fingerprint onto another id so exact
        # distance ties exercise the id tie-break.
        if rng.random() < 0.3:
            src, dst = rng.choice(n, size=2, replace=False)
            stats[ids[dst]] = stats[ids[src]]
            categories[dst] = categories[src]
            products[dst] = Product(
                ids[dst], f"item {ids[dst]}", str(categories[src]), "brand", "store", 10.0
            )

        target = ids[int(rng.integers(n))]
        k = int(rng.integers(1, 9))
        got = top_competitors(target, products, stats, k=k)

        vectors = _reference_vectors([stats[pid] for pid in ids])
        position = dict(zip(ids, vectors))
        target_category = next(p.category for p in products if p.id == target)
        ranked = sorted(
            (math.dist(position[target], position[pid]), pid)
            for pid, p in zip(ids, products)
            if pid != target and p.category == target_category
        )
        expected = [pid for _, pid in ranked[:k]]
        assert list(got.ids) == expected
        assert got.short_list == (len(ranked) < k)


# --- 8. projection quality and determinism ------------------------------------


def test_projection_cluster_purity_and_determinism():
    rng = np.random.default_rng(42)
    vectors = np.vstack(
        [
            rng.normal(0.0, 0.25, size=(30, 6)),
            rng.normal(3.0, 0.25, size=(30, 6)),
        ]
    )
    labels = np.repeat([0, 1], 30)

    for seed in (0, 1, 2):
        first = project_products(vectors, seed=seed, perplexity=10.0)
        again = project_products(vectors, seed=seed, perplexity=10.0)
        assert first.method == "tsne"
        coords = np.asarray(first.coords, dtype=np.float64)
        assert np.array_equal(coords, np.asarray(again.coords, dtype=np.float64))
        assert np.isfinite(coords).all()
        assert first.kl_final <= first.kl_initial

        deltas = coords[:, None, :] - coords[None, :, :]
        distances = np.sqrt((deltas**2).sum(axis=2))
        np.fill_diagonal(distances, np.inf)
        neighbor = distances.argmin(axis=1)
        purity = float(np.mean(labels[neighbor] == labels))
        assert purity >= 0.90, f"seed {seed}: nearest-neighbor purity {purity:.0%}"


# --- 9. first-day growth rate ---------------------------------------------------


def test_growth_rate_examples():
    before, launch = date(2024, 5, 1), date(2024, 5, 2)
    assert growth_rate({before: 100.0, launch: 120.0}, launch) == 0.2
    assert growth_rate({before: 55.0, launch: 55.0}, launch) == 0.0
    with pytest.raises(UndefinedGrowth):
        growth_rate({before: 0.0, launch: 10.0}, launch)


# --- 10. evaluation metric arithmetic -------------------------------------------


def test_metric_examples():
    perfect = evaluate(np.array([3.0, 4.0, 5.0]), np.array([3.0, 4.0, 5.0]))
    assert perfect.rmse == 0.0
    assert perfect.mape == 0.0

    symmetric = evaluate(np.array([100.0, 100.0]), np.array([110.0, 90.0]))
    assert symmetric.rmse == 10.0
    assert symmetric.mape == 10.0

    zero_skipped = evaluate(np.array([0.0, 10.0]), np.array([5.0, 10.0]))
    assert zero_skipped.rmse == math.sqrt(12.5)
    assert zero_skipped.mape == 0.0
