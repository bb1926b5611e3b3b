"""Core value objects shared by every subsystem, plus dataset validation.

All types are frozen dataclasses: a loaded dataset is immutable and can be
shared across threads without coordination. Monetary amounts are kept as
floats quantized to two decimals (see :func:`quantize_currency`), which makes
CSV/JSON round-trips field-exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Iterable, Sequence

__all__ = [
    "PromotionKind",
    "DIRECT_KINDS",
    "INDIRECT_KINDS",
    "ModelKind",
    "Product",
    "SalesDay",
    "SalesSeries",
    "PromotionRecord",
    "FeatureVector",
    "ForecastResult",
    "Violation",
    "ValidationReport",
    "Dataset",
    "quantize_currency",
    "validate_dataset",
]


def quantize_currency(value: float) -> float:
    """Round a monetary amount to 2 decimals.

    A float produced this way survives ``"%.2f"`` formatting and re-parsing
    unchanged, so serialized datasets round-trip exactly.
    """
    return round(float(value), 2)


class PromotionKind(enum.Enum):
    VALUE_DISCOUNT = "ValueDiscount"
    PERCENTAGE_DISCOUNT = "PercentageDiscount"
    FLASH_SALE = "FlashSale"
    LOYALTY_POINTS = "LoyaltyPoints"
    FREE_SHIPPING = "FreeShipping"
    INTEREST_FREE_INSTALLMENT = "InterestFreeInstallment"

    @property
    def is_direct(self) -> bool:
        return self in DIRECT_KINDS


DIRECT_KINDS = frozenset(
    {
        PromotionKind.VALUE_DISCOUNT,
        PromotionKind.PERCENTAGE_DISCOUNT,
        PromotionKind.FLASH_SALE,
    }
)
INDIRECT_KINDS = frozenset(
    {
        PromotionKind.LOYALTY_POINTS,
        PromotionKind.FREE_SHIPPING,
        PromotionKind.INTEREST_FREE_INSTALLMENT,
    }
)


class ModelKind(enum.Enum):
    RANDOM_FOREST = "RandomForest"
    GRADIENT_BOOSTING = "GradientBoosting"
    MLP = "MLP"


@dataclass(frozen=True, slots=True)
class Product:
    id: str
    title: str
    category: str
    brand: str
    store: str
    base_price: float


@dataclass(frozen=True, slots=True)
class SalesDay:
    date: date
    units_sold: int
    price: float


@dataclass(frozen=True, slots=True)
class SalesSeries:
    product_id: str
    days: tuple[SalesDay, ...]

    def units(self) -> list[int]:
        return [d.units_sold for d in self.days]

    def prices(self) -> list[float]:
        return [d.price for d in self.days]

    def dates(self) -> list[date]:
        return [d.date for d in self.days]


@dataclass(frozen=True, slots=True)
class PromotionRecord:
    id: str
    product_id: str
    raw_text: str
    kind: PromotionKind
    k_d: float
    p_t: float
    reward: float
    start: date
    end: date
    enabled: bool = True
    # FlashSale duration; kept as metadata, never a feature slot.
    flash_hours: float = 0.0

    def with_dates(self, start: date, end: date) -> "PromotionRecord":
        return replace(self, start=start, end=end)

    def with_enabled(self, enabled: bool) -> "PromotionRecord":
        return replace(self, enabled=enabled)


FEATURE_GROUPS = ("descriptions", "price", "temporal", "competitive", "promotion")


@dataclass(frozen=True)
class FeatureVector:
    """One (product, day) model input row.

    ``group_map`` partitions the index set into the five attribution groups;
    blocks are disjoint, non-empty, and together cover every index.
    """

    values: tuple[float, ...]
    group_map: dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class ForecastResult:
    """Per-day predictions with their five-group Shapley decomposition.

    Invariant: for every day, ``sum(attributions[i]) + baseline`` equals
    ``predictions[i]`` within 1e-6.
    """

    model_kind: ModelKind
    horizon: tuple[date, ...]
    predictions: tuple[float, ...]
    attributions: tuple[tuple[float, ...], ...]
    baseline: float
    attributions_normalized: tuple[tuple[float, ...], ...] = ()


@dataclass(frozen=True, slots=True)
class Violation:
    locator: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{v.locator}: {v.message}" for v in self.violations)


@dataclass(frozen=True)
class Dataset:
    """A validated bundle of products, sales series, and promotions."""

    products: tuple[Product, ...]
    sales: tuple[SalesSeries, ...]
    promotions: tuple[PromotionRecord, ...]

    def product_by_id(self, product_id: str) -> Product | None:
        for p in self.products:
            if p.id == product_id:
                return p
        return None

    def series_by_product(self, product_id: str) -> SalesSeries | None:
        for s in self.sales:
            if s.product_id == product_id:
                return s
        return None

    def promotions_for(self, product_id: str) -> tuple[PromotionRecord, ...]:
        return tuple(p for p in self.promotions if p.product_id == product_id)


def validate_dataset(
    products: Sequence[Product],
    sales: Sequence[SalesSeries],
    promotions: Sequence[PromotionRecord],
) -> ValidationReport:
    """Check every domain invariant; violations are data, not exceptions.

    Validation is a pure function, so re-validating an accepted dataset
    yields an identical (empty) report.
    """
    violations: list[Violation] = []

    def bad(locator: str, rule: str, message: str) -> None:
        violations.append(Violation(locator, rule, message))

    if not products:
        bad("products", "no-products", "no products")

    seen_ids: set[str] = set()
    for p in products:
        loc = f"product[{p.id!r}]"
        if not p.id:
            bad(loc, "empty-id", "product id is empty")
        elif p.id in seen_ids:
            bad(loc, "duplicate-id", f"duplicate id {p.id!r}")
        seen_ids.add(p.id)
        if p.base_price < 0:
            bad(loc, "negative-base-price", f"base_price {p.base_price} < 0")

    series_products: set[str] = set()
    for s in sales:
        loc = f"sales[{s.product_id!r}]"
        if s.product_id not in seen_ids:
            bad(loc, "unknown-product", f"sales for unknown product {s.product_id!r}")
        if s.product_id in series_products:
            bad(loc, "duplicate-series", f"multiple series for {s.product_id!r}")
        series_products.add(s.product_id)
        prev: date | None = None
        for i, day in enumerate(s.days):
            dloc = f"{loc}.day[{i}]"
            if prev is not None:
                if day.date == prev:
                    bad(dloc, "duplicate-date", f"duplicate date {day.date}")
                elif day.date < prev:
                    bad(dloc, "dates-not-increasing", f"{day.date} after {prev}")
            prev = day.date
            if day.units_sold < 0:
                bad(dloc, "negative-sales", f"negative sales {day.units_sold}")
            if day.price < 0:
                bad(dloc, "negative-price", f"negative price {day.price}")

    promo_ids: set[str] = set()
    for promo in promotions:
        loc = f"promotion[{promo.id!r}]"
        if not promo.id:
            bad(loc, "empty-id", "promotion id is empty")
        elif promo.id in promo_ids:
            bad(loc, "duplicate-id", f"duplicate promotion id {promo.id!r}")
        promo_ids.add(promo.id)
        if promo.product_id not in seen_ids:
            bad(loc, "unknown-product", f"promotion for unknown product {promo.product_id!r}")
        if promo.start > promo.end:
            bad(loc, "inverted-span", f"start {promo.start} after end {promo.end}")
        if not 0.0 <= promo.k_d <= 1.0:
            bad(loc, "k_d-range", f"k_d {promo.k_d} outside [0, 1]")
        if promo.p_t < 0:
            bad(loc, "negative-trigger", f"trigger amount {promo.p_t} < 0")
        if promo.kind.is_direct:
            if promo.k_d <= 0:
                bad(loc, "direct-without-rate", "direct discount with k_d = 0")
            if promo.reward != 0:
                bad(loc, "direct-with-reward", f"direct discount carries reward {promo.reward}")
        else:
            if promo.reward <= 0:
                bad(loc, "indirect-without-reward", "indirect discount with reward = 0")
            if promo.k_d != 0:
                bad(loc, "indirect-with-rate", f"indirect discount carries k_d {promo.k_d}")

    return ValidationReport(tuple(violations))
