"""Seeded synthetic catalogs with known ground truth.

The generator exists so that model, attribution, and what-if behaviour can
be verified quantitatively: every day's true demand decomposition (season,
price, promotion lift) is emitted alongside the observable data. Ground
truth is never an input to any model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np

from .domain import (
    Dataset,
    Product,
    PromotionKind,
    PromotionRecord,
    SalesDay,
    SalesSeries,
    quantize_currency,
)
from .promos import (
    DEFAULT_CONVERSION,
    RewardConversion,
    parse_promotion,
    promotion_strength,
    render_promotion,
)

__all__ = [
    "SyntheticConfig",
    "GroundTruthDay",
    "SyntheticDataset",
    "generate_synthetic",
    "simulate_series",
]

_CATEGORIES = ("shoes", "apparel", "electronics")
_TITLE_WORDS = {
    "shoes": (("trail", "road", "urban", "winter"), ("runner", "sneaker", "boot", "sandal")),
    "apparel": (("merino", "cotton", "rain", "thermal"), ("jacket", "hoodie", "shirt", "vest")),
    "electronics": (("wireless", "compact", "smart", "portable"), ("speaker", "charger", "lamp", "scale")),
}
_BRANDS = ("acme", "nordwind", "kestrel", "volta")
_STORES = ("main", "outlet")


@dataclass(frozen=True)
class SyntheticConfig:
    n_products: int = 20
    n_days: int = 400
    base_demand: float = 100.0
    price_elasticity: float = -1.5
    promo_lift: float = 1.0
    season_amplitude: float = 0.2
    noise_sd: float = 5.0
    seed: int = 0
    # Per-day chance that a new campaign starts while none is running.
    campaign_rate: float = 0.02
    # Std of the day-to-day price wobble, as a fraction of base price. The
    # wobble is independent of promotions so price and promotion effects
    # stay separately identifiable.
    price_jitter: float = 0.05
    start: date = date(2023, 1, 1)

    def validate(self) -> None:
        if self.n_products < 1:
            raise ValueError("n_products must be >= 1")
        if self.n_days < 30:
            raise ValueError("n_days must be >= 30")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        if self.promo_lift < 0:
            raise ValueError("promo_lift must be >= 0")
        if self.price_elasticity > 0:
            raise ValueError("price_elasticity must be <= 0")
        if not 0.0 <= self.campaign_rate <= 1.0:
            raise ValueError("campaign_rate must be in [0, 1]")


@dataclass(frozen=True)
class GroundTruthDay:
    """True demand decomposition for one day, before noise and rounding."""

    date: date
    strength: float
    season_factor: float
    price_factor: float
    promo_factor: float
    expected_units: float


@dataclass(frozen=True)
class SyntheticDataset:
    products: tuple[Product, ...]
    sales: tuple[SalesSeries, ...]
    promotions: tuple[PromotionRecord, ...]
    ground_truth: dict[str, tuple[GroundTruthDay, ...]]
    config: SyntheticConfig

    def dataset(self) -> Dataset:
        """The observable part, as fed to models and the server."""
        return Dataset(self.products, self.sales, self.promotions)


def _sample_promotion(
    rng: np.random.Generator, promo_id: str, product: Product, start: date, end: date
) -> PromotionRecord:
    """One campaign with its text rendered in a random grammar, then parsed
    back so stored numeric fields always equal what parsing would yield."""
    kind = list(PromotionKind)[int(rng.integers(0, 6))]
    if kind is PromotionKind.VALUE_DISCOUNT:
        trigger = max(1, int(round(product.base_price * rng.uniform(1.0, 3.0))))
        amount = max(1, int(round(trigger * rng.uniform(0.05, 0.3))))
        text = render_promotion(kind, amount=amount, trigger=trigger)
    elif kind is PromotionKind.PERCENTAGE_DISCOUNT:
        text = render_promotion(kind, percent=int(rng.integers(5, 41)))
    elif kind is PromotionKind.FLASH_SALE:
        hours = int(rng.choice([2, 4, 6, 12, 24]))
        text = render_promotion(kind, percent=int(rng.integers(10, 51)), hours=hours)
    elif kind is PromotionKind.LOYALTY_POINTS:
        text = render_promotion(kind, points=int(rng.integers(50, 501)))
    elif kind is PromotionKind.FREE_SHIPPING:
        trigger = max(1, int(round(product.base_price * rng.uniform(0.5, 2.0))))
        text = render_promotion(kind, trigger=trigger)
    else:
        text = render_promotion(kind, months=int(rng.choice([3, 6, 12, 24])))
    parsed = parse_promotion(text)
    return PromotionRecord(
        id=promo_id,
        product_id=product.id,
        raw_text=text,
        kind=parsed.kind,
        k_d=parsed.k_d,
        p_t=parsed.p_t,
        reward=parsed.reward,
        flash_hours=parsed.flash_hours,
        start=start,
        end=end,
    )


def _sample_campaigns(
    rng: np.random.Generator, product: Product, days: Sequence[date], config: SyntheticConfig
) -> list[PromotionRecord]:
    """Sequential 3-10 day campaigns; spans are clipped to the dataset."""
    promos: list[PromotionRecord] = []
    last_day = days[-1]
    i = 0
    while i < len(days):
        if rng.random() < config.campaign_rate:
            duration = int(rng.integers(3, 11))
            start = days[i]
            end = min(start + timedelta(days=duration - 1), last_day)
            promos.append(
                _sample_promotion(
                    rng, f"{product.id}-promo-{len(promos)}", product, start, end
                )
            )
            i += duration + 1  # at most one campaign running at a time
        else:
            i += 1
    return promos


def simulate_series(
    product: Product,
    days: Sequence[date],
    promotions: Sequence[PromotionRecord],
    config: SyntheticConfig,
    rng: np.random.Generator,
    conversion: RewardConversion = DEFAULT_CONVERSION,
) -> tuple[SalesSeries, tuple[GroundTruthDay, ...]]:
    """Draw one product's daily sales from the demand formula:

    units = round(max(0, base_demand
                         * (1 + season_amplitude * cos(2*pi*doy/365.25))
                         * (price/base_price)^elasticity
                         * (1 + promo_lift * strength(day))
                         + noise))

    where strength(day) aggregates every active promotion's price-fraction
    value (direct k_d plus normalized indirect rewards).
    """
    jitter = rng.standard_normal(len(days)) * config.price_jitter
    noise = rng.standard_normal(len(days)) * config.noise_sd

    sale_days: list[SalesDay] = []
    truth: list[GroundTruthDay] = []
    for i, day in enumerate(days):
        price = quantize_currency(
            product.base_price * float(np.clip(1.0 + jitter[i], 0.5, 1.5))
        )
        doy = day.timetuple().tm_yday
        season = 1.0 + config.season_amplitude * np.cos(2 * np.pi * doy / 365.25)
        price_factor = (price / product.base_price) ** config.price_elasticity
        strength = promotion_strength(promotions, day, product.base_price, conversion)
        promo_factor = 1.0 + config.promo_lift * strength
        expected = config.base_demand * season * price_factor * promo_factor
        units = int(round(max(0.0, expected + noise[i])))
        sale_days.append(SalesDay(date=day, units_sold=units, price=price))
        truth.append(
            GroundTruthDay(
                date=day,
                strength=strength,
                season_factor=float(season),
                price_factor=float(price_factor),
                promo_factor=float(promo_factor),
                expected_units=float(expected),
            )
        )
    return SalesSeries(product_id=product.id, days=tuple(sale_days)), tuple(truth)


def generate_synthetic(config: SyntheticConfig) -> SyntheticDataset:
    """A full synthetic catalog, a pure function of its config."""
    config.validate()
    children = np.random.SeedSequence(config.seed).spawn(config.n_products + 1)
    catalog_rng = np.random.default_rng(children[0])
    product_seeds = children[1:]

    days = [config.start + timedelta(days=i) for i in range(config.n_days)]

    products: list[Product] = []
    for i in range(config.n_products):
        category = _CATEGORIES[i % len(_CATEGORIES)]
        adjectives, nouns = _TITLE_WORDS[category]
        title = (
            f"{catalog_rng.choice(adjectives)} {catalog_rng.choice(nouns)} "
            f"{catalog_rng.integers(100, 1000)}"
        )
        products.append(
            Product(
                id=f"p{i:03d}",
                title=title,
                category=category,
                brand=str(catalog_rng.choice(_BRANDS)),
                store=str(catalog_rng.choice(_STORES)),
                base_price=quantize_currency(float(catalog_rng.uniform(40, 200))),
            )
        )

    sales: list[SalesSeries] = []
    promotions: list[PromotionRecord] = []
    ground_truth: dict[str, tuple[GroundTruthDay, ...]] = {}
    for product, seed in zip(products, product_seeds):
        rng = np.random.default_rng(seed)
        promos = _sample_campaigns(rng, product, days, config)
        series, truth = simulate_series(product, days, promos, config, rng)
        sales.append(series)
        promotions.extend(promos)
        ground_truth[product.id] = truth

    return SyntheticDataset(
        products=tuple(products),
        sales=tuple(sales),
        promotions=tuple(promotions),
        ground_truth=ground_truth,
        config=config,
    )
