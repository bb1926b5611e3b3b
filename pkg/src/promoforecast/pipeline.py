"""Dataset-level orchestration shared by the CLI, the service, and the
what-if engine: one feature context per dataset, training matrices, the
chronological split, and recursive horizon forecasting.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Sequence

import numpy as np

from .analytics import SeriesTooShort, product_stats, top_competitors
from .domain import Dataset, ForecastResult, ModelKind, PromotionRecord
from .explain import Background, attribute_horizon, make_background
from .features import (
    DEFAULT_LIFECYCLE_WINDOW,
    FeatureLayout,
    SeriesHistory,
    TitleEmbedder,
    build_codebook,
    default_layout,
    feature_values,
)
from .promos import DEFAULT_CONVERSION, RewardConversion

__all__ = [
    "DEFAULT_HORIZON_CAP",
    "ForecastContext",
    "HorizonError",
    "LayoutMismatch",
    "TrainingRows",
    "UnknownProduct",
    "build_training_background",
    "forecast",
    "result_to_wire",
    "split_chronological",
]

DEFAULT_HORIZON_CAP = 90


class UnknownProduct(KeyError):
    """Product id absent from the dataset."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown product"


class HorizonError(ValueError):
    """Requested horizon is empty, starts before history, or extends past
    the configured future cap."""


class LayoutMismatch(ValueError):
    """Model was trained on a different feature layout."""


@dataclass(frozen=True)
class TrainingRows:
    """A supervised matrix plus the provenance of every row."""

    X: np.ndarray
    y: np.ndarray
    dates: tuple[date, ...]
    product_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.y)


class ForecastContext:
    """Everything derived from one dataset that feature assembly needs:
    the title codebook and embedder, per-product history views, product
    statistics, and each product's competitor set.

    Build once per dataset; the context is immutable in use and safe to
    share across threads.
    """

    def __init__(
        self,
        dataset: Dataset,
        seed: int = 0,
        conversion: RewardConversion = DEFAULT_CONVERSION,
        window_days: int = DEFAULT_LIFECYCLE_WINDOW,
    ):
        self.dataset = dataset
        self.seed = seed
        self.conversion = conversion
        self.window_days = window_days
        self.layout: FeatureLayout = default_layout()

        codebook = build_codebook(p.title for p in dataset.products)
        self.embedder = TitleEmbedder(codebook, seed=seed)

        self._products = {p.id: p for p in dataset.products}
        self._hist = {
            s.product_id: SeriesHistory.of(s)
            for s in dataset.sales
            if len(s.days) > 0
        }
        self._promos = {
            p.id: dataset.promotions_for(p.id) for p in dataset.products
        }

        self.stats = {}
        for product in dataset.products:
            series = dataset.series_by_product(product.id)
            if series is None:
                continue
            try:
                self.stats[product.id] = product_stats(
                    series, self._promos[product.id], product.base_price, conversion
                )
            except SeriesTooShort:
                continue

        self.competitor_ids: dict[str, tuple[str, ...]] = {}
        scored = [p for p in dataset.products if p.id in self.stats]
        if len(scored) >= 2:
            for product in scored:
                ranked = top_competitors(product.id, scored, self.stats)
                self.competitor_ids[product.id] = tuple(ranked.ids)

    # -- lookups --------------------------------------------------------

    def product(self, product_id: str):
        try:
            return self._products[product_id]
        except KeyError:
            raise UnknownProduct(f"unknown product {product_id!r}") from None

    def history(self, product_id: str) -> SeriesHistory:
        self.product(product_id)
        hist = self._hist.get(product_id)
        if hist is None:
            raise UnknownProduct(f"{product_id} has no sales history")
        return hist

    def promotions(self, product_id: str) -> tuple[PromotionRecord, ...]:
        self.product(product_id)
        return self._promos.get(product_id, ())

    def competitor_views(self, product_id: str) -> list[SeriesHistory]:
        ids = self.competitor_ids.get(product_id, ())
        return [self._hist[cid] for cid in ids if cid in self._hist]

    # -- feature assembly -------------------------------------------------

    def feature_row(
        self,
        product_id: str,
        day: date,
        promotions: Sequence[PromotionRecord] | None = None,
        history: SeriesHistory | None = None,
    ) -> np.ndarray:
        """One raw feature row; promotions and history default to the
        dataset's own, overridable for scenario runs and recursion."""
        product = self.product(product_id)
        return feature_values(
            product,
            day,
            history if history is not None else self.history(product_id),
            self.promotions(product_id) if promotions is None else promotions,
            self.competitor_views(product_id),
            self.embedder,
            self.conversion,
            self.window_days,
        )

    def training_rows(self, product_ids: Sequence[str] | None = None) -> TrainingRows:
        """Supervised rows for every observed day that has prior history
        (each series' first day is skipped — it has nothing to average)."""
        if product_ids is None:
            product_ids = [p.id for p in self.dataset.products if p.id in self._hist]
        rows: list[np.ndarray] = []
        targets: list[float] = []
        dates: list[date] = []
        pids: list[str] = []
        for pid in product_ids:
            series = self.dataset.series_by_product(pid)
            if series is None:
                raise UnknownProduct(f"unknown product {pid!r}")
            hist = self.history(pid)
            promos = self.promotions(pid)
            competitors = self.competitor_views(pid)
            product = self.product(pid)
            for day_record in series.days[1:]:
                rows.append(
                    feature_values(
                        product, day_record.date, hist, promos, competitors,
                        self.embedder, self.conversion, self.window_days,
                    )
                )
                targets.append(float(day_record.units_sold))
                dates.append(day_record.date)
                pids.append(pid)
        if not rows:
            raise ValueError("dataset yields no training rows")
        return TrainingRows(
            X=np.vstack(rows),
            y=np.asarray(targets, dtype=np.float64),
            dates=tuple(dates),
            product_ids=tuple(pids),
        )


def split_chronological(
    dates: Sequence[date], fraction: float = 0.8
) -> tuple[np.ndarray, np.ndarray]:
    """Index split with the earliest ``fraction`` of rows (by date, stable
    within ties) for training and the remainder for testing."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    n = len(dates)
    order = np.argsort([d.toordinal() for d in dates], kind="stable")
    cut = int(n * fraction)
    if cut == 0 or cut == n:
        raise ValueError(f"split leaves an empty side ({n} rows, fraction {fraction})")
    return order[:cut], order[cut:]


def build_training_background(
    context: ForecastContext, size: int = 64, seed: int = 0
) -> Background:
    """Background sample for attribution, drawn from the full training
    matrix."""
    return make_background(context.training_rows().X, size=size, seed=seed)


def result_to_wire(result: ForecastResult, group_names: Sequence[str]) -> dict:
    """JSON-ready form of a forecast, carrying both raw attributions and
    the display variant rescaled so each day's absolute values sum to 1."""
    normalized = []
    for attr in result.attributions:
        total = sum(abs(a) for a in attr)
        normalized.append(
            [a / total for a in attr] if total > 0 else [0.0] * len(attr)
        )
    return {
        "model_kind": result.model_kind.value,
        "horizon": [d.isoformat() for d in result.horizon],
        "predictions": list(result.predictions),
        "baseline": result.baseline,
        "groups": list(group_names),
        "attributions": [list(a) for a in result.attributions],
        "normalized_attributions": normalized,
    }


def _clamped(model):
    """Served predictions are sales, so they are floored at zero; the same
    floored function is what gets attributed, keeping efficiency exact."""

    def predict(X: np.ndarray) -> np.ndarray:
        return np.maximum(model.predict_many(X), 0.0)

    return predict


def forecast(
    context: ForecastContext,
    product_id: str,
    model,
    start: date,
    end: date,
    background: Background,
    promotions: Sequence[PromotionRecord] | None = None,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> ForecastResult:
    """Per-day predictions with five-group attribution over [start, end].

    Days beyond the last observation are forecast recursively: each
    predicted value is appended to the history so later days' trailing
    averages see it. Prices beyond the data carry the last observed price
    forward, and competitor histories stay as observed.
    """
    product = context.product(product_id)
    hist = context.history(product_id)
    if promotions is None:
        promotions = context.promotions(product_id)

    if model.layout_fingerprint and model.layout_fingerprint != context.layout.fingerprint:
        raise LayoutMismatch(
            f"model expects layout {model.layout_fingerprint}, "
            f"dataset has {context.layout.fingerprint}"
        )
    if end < start:
        raise HorizonError(f"horizon end {end} precedes start {start}")
    last_observed = date.fromordinal(int(hist.ordinals[-1]))
    if end > last_observed + timedelta(days=horizon_cap):
        raise HorizonError(
            f"horizon end {end} is more than {horizon_cap} days past the "
            f"last observation {last_observed}"
        )

    competitors = context.competitor_views(product_id)
    days = [start + timedelta(days=i) for i in range((end - start).days + 1)]
    rows: list[np.ndarray] = []
    predictions: list[float] = []
    view = hist
    for day in days:
        row = feature_values(
            product, day, view, promotions, competitors,
            context.embedder, context.conversion, context.window_days,
        )
        rows.append(row)
        pred = max(0.0, float(model.predict_row(row)))
        predictions.append(pred)
        if day > last_observed:
            price = view.price_on(day, fallback=product.base_price)
            view = view.extended([day], [pred], [price])

    matrix = np.vstack(rows)
    attributions = attribute_horizon(
        _clamped(model), matrix, background, context.layout.groups
    )
    group_names = list(context.layout.groups)
    return ForecastResult(
        model_kind=ModelKind(model.kind),
        horizon=tuple(days),
        predictions=tuple(predictions),
        attributions=tuple(
            tuple(att.phi[g] for g in group_names) for att in attributions
        ),
        baseline=attributions[0].baseline if attributions else 0.0,
    )
