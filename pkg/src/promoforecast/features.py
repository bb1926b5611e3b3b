"""Model-input assembly: one row per (product, day), partitioned into the
five attribution groups (descriptions, price, temporal, competitive,
promotion).

Slot layout is fixed and exported as JSON (see :class:`FeatureLayout`) so
models, the explainer, and UI clients agree on which indices belong to which
group.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .domain import FeatureVector, Product, PromotionKind, PromotionRecord, SalesSeries
from .promos import (
    DEFAULT_CONVERSION,
    DEFAULT_LIFECYCLE_WINDOW,
    LifecycleStatus,
    RewardConversion,
    lifecycle_status,
    promotion_value,
)

__all__ = [
    "InsufficientHistory",
    "tokenize",
    "Codebook",
    "build_codebook",
    "encode_title",
    "TitleEmbedder",
    "embed_title",
    "SeriesHistory",
    "historical_averages",
    "FeatureLayout",
    "default_layout",
    "assemble_features",
    "feature_values",
    "TITLE_DIM",
    "HISTORY_WINDOWS",
    "KIND_ORDER",
]

TITLE_DIM = 8
# Trailing windows for "last month, quarter, half year, full year".
HISTORY_WINDOWS = (30, 90, 182, 365)
KIND_ORDER = (
    PromotionKind.VALUE_DISCOUNT,
    PromotionKind.PERCENTAGE_DISCOUNT,
    PromotionKind.FLASH_SALE,
    PromotionKind.LOYALTY_POINTS,
    PromotionKind.FREE_SHIPPING,
    PromotionKind.INTEREST_FREE_INSTALLMENT,
)

_WORD_RE = re.compile(r"[a-z0-9]+")


class InsufficientHistory(ValueError):
    """Raised when a day has no prior observations to average over."""


def tokenize(title: str) -> list[str]:
    return _WORD_RE.findall(title.lower())


@dataclass(frozen=True)
class Codebook:
    """Ordered unique token list over all product titles."""

    words: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    def index_of(self, word: str) -> int | None:
        return self._index.get(word)


def build_codebook(titles: Iterable[str]) -> Codebook:
    """Union of title tokens, lowercased, in first-appearance order."""
    words: list[str] = []
    seen: set[str] = set()
    for title in titles:
        for token in tokenize(title):
            if token not in seen:
                seen.add(token)
                words.append(token)
    if not words:
        raise ValueError("cannot build a codebook: all titles are empty")
    return Codebook(tuple(words))


def encode_title(title: str, codebook: Codebook) -> np.ndarray:
    """Binary bag-of-words vector; out-of-codebook tokens are ignored."""
    vec = np.zeros(len(codebook), dtype=np.float64)
    for token in tokenize(title):
        idx = codebook.index_of(token)
        if idx is not None:
            vec[idx] = 1.0
    return vec


class TitleEmbedder:
    """Seeded random projection of the sparse BOW vector down to 8 dims.

    Deterministic for a given (codebook, seed); the zero vector maps to the
    zero vector. The interface admits a learned replacement.
    """

    def __init__(self, codebook: Codebook, seed: int = 0):
        self.codebook = codebook
        self.seed = int(seed)
        rng = np.random.default_rng(self.seed)
        scale = 1.0 / np.sqrt(TITLE_DIM)
        self.projection = rng.standard_normal((len(codebook), TITLE_DIM)) * scale

    def embed(self, binary_vector: np.ndarray) -> np.ndarray:
        vec = np.asarray(binary_vector, dtype=np.float64)
        if vec.shape != (len(self.codebook),):
            raise ValueError(
                f"expected vector of length {len(self.codebook)}, got shape {vec.shape}"
            )
        return vec @ self.projection

    def embed_text(self, title: str) -> np.ndarray:
        return self.embed(encode_title(title, self.codebook))


def embed_title(binary_vector: np.ndarray, embedder: TitleEmbedder) -> np.ndarray:
    return embedder.embed(binary_vector)


class SeriesHistory:
    """Array view over a sales series with prefix sums for O(1) trailing
    means. Building one per series once and reusing it keeps full-dataset
    feature assembly cheap."""

    def __init__(self, dates: Sequence[date], units: Sequence[float], prices: Sequence[float]):
        self.ordinals = np.asarray([d.toordinal() for d in dates], dtype=np.int64)
        self.units = np.asarray(units, dtype=np.float64)
        self.prices = np.asarray(prices, dtype=np.float64)
        self._cum_units = np.concatenate(([0.0], np.cumsum(self.units)))

    @classmethod
    def of(cls, series: "SalesSeries | SeriesHistory") -> "SeriesHistory":
        if isinstance(series, SeriesHistory):
            return series
        return cls(series.dates(), series.units(), series.prices())

    def __len__(self) -> int:
        return len(self.ordinals)

    def count_before(self, day: date) -> int:
        return int(np.searchsorted(self.ordinals, day.toordinal(), side="left"))

    def trailing_mean(self, day: date, window: int) -> float:
        """Mean units over the last min(window, available) observations
        strictly before ``day``."""
        k = self.count_before(day)
        if k == 0:
            raise InsufficientHistory(f"no sales history before {day}")
        lo = max(0, k - window)
        return float((self._cum_units[k] - self._cum_units[lo]) / (k - lo))

    def trailing_mean_or_zero(self, day: date, window: int) -> float:
        try:
            return self.trailing_mean(day, window)
        except InsufficientHistory:
            return 0.0

    def price_on(self, day: date, fallback: float | None = None) -> float:
        """Price at the most recent observation on or before ``day``; a
        leading gap falls back to ``fallback`` (or the first observed price)."""
        k = int(np.searchsorted(self.ordinals, day.toordinal(), side="right"))
        if k == 0:
            if fallback is not None:
                return float(fallback)
            return float(self.prices[0]) if len(self.prices) else 0.0
        return float(self.prices[k - 1])

    def extended(
        self, dates: Sequence[date], units: Sequence[float], prices: Sequence[float]
    ) -> "SeriesHistory":
        """New view with extra (strictly later) observations appended; used
        by recursive future forecasting."""
        out = SeriesHistory.__new__(SeriesHistory)
        out.ordinals = np.concatenate(
            (self.ordinals, [d.toordinal() for d in dates])
        ).astype(np.int64)
        out.units = np.concatenate((self.units, np.asarray(units, dtype=np.float64)))
        out.prices = np.concatenate((self.prices, np.asarray(prices, dtype=np.float64)))
        out._cum_units = np.concatenate(([0.0], np.cumsum(out.units)))
        return out


def historical_averages(
    series: SalesSeries | SeriesHistory, day: date
) -> tuple[float, float, float, float]:
    """Trailing mean daily sales over the last 30/90/182/365 observations
    ending the day before ``day``; shorter histories use what is available."""
    hist = SeriesHistory.of(series)
    return tuple(hist.trailing_mean(day, w) for w in HISTORY_WINDOWS)


@dataclass(frozen=True)
class SlotSpec:
    index: int
    name: str
    group: str
    unit: str


class FeatureLayout:
    """Immutable slot table: index -> (name, group, unit)."""

    def __init__(self, slots: Sequence[SlotSpec]):
        self.slots = tuple(slots)
        groups: dict[str, list[int]] = {}
        for slot in self.slots:
            groups.setdefault(slot.group, []).append(slot.index)
        self.groups = {g: tuple(ix) for g, ix in groups.items()}
        self.names = tuple(s.name for s in self.slots)

    def __len__(self) -> int:
        return len(self.slots)

    def group_of(self, index: int) -> str:
        return self.slots[index].group

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def to_json(self) -> str:
        return json.dumps(
            {
                "slots": [
                    {"index": s.index, "name": s.name, "group": s.group, "unit": s.unit}
                    for s in self.slots
                ],
                "groups": {g: list(ix) for g, ix in self.groups.items()},
            },
            indent=2,
        )

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def default_layout() -> FeatureLayout:
    slots: list[SlotSpec] = []

    def add(name: str, group: str, unit: str) -> None:
        slots.append(SlotSpec(len(slots), name, group, unit))

    for i in range(TITLE_DIM):
        add(f"title_emb_{i}", "descriptions", "embedding")
    add("price", "price", "currency")
    add("price_ratio", "price", "ratio")
    for i in range(7):
        add(f"dow_{i}", "temporal", "indicator")
    for m in range(1, 13):
        add(f"month_{m}", "temporal", "indicator")
    for w in HISTORY_WINDOWS:
        add(f"avg_{w}", "temporal", "units/day")
    add("competitor_mean_price", "competitive", "currency")
    add("competitor_mean_trailing7", "competitive", "units/day")
    for kind in KIND_ORDER:
        add(f"{kind.value}_status", "promotion", "ordinal")
        add(f"{kind.value}_value", "promotion", "fraction")
        add(f"{kind.value}_trigger_ratio", "promotion", "ratio")
    add("promotion_strength", "promotion", "fraction")
    return FeatureLayout(slots)


_STATUS_PRIORITY = (LifecycleStatus.ACTIVE, LifecycleStatus.PRE, LifecycleStatus.POST)


def feature_values(
    product: Product,
    day: date,
    series: SalesSeries | SeriesHistory,
    promotions: Sequence[PromotionRecord],
    competitors: Sequence[SalesSeries | SeriesHistory],
    embedder: TitleEmbedder,
    conversion: RewardConversion = DEFAULT_CONVERSION,
    window_days: int = DEFAULT_LIFECYCLE_WINDOW,
) -> np.ndarray:
    """Assemble the raw 54-slot feature row for (product, day).

    Raises :class:`InsufficientHistory` when the day has no prior sales.
    """
    hist = SeriesHistory.of(series)
    price_scale = product.base_price if product.base_price > 0 else 1.0

    values = np.zeros(_LAYOUT_LEN, dtype=np.float64)
    pos = 0

    emb = embedder.embed_text(product.title)
    values[pos : pos + TITLE_DIM] = emb
    pos += TITLE_DIM

    price = hist.price_on(day, fallback=product.base_price)
    values[pos] = price
    values[pos + 1] = price / price_scale
    pos += 2

    values[pos + day.weekday()] = 1.0
    pos += 7
    values[pos + day.month - 1] = 1.0
    pos += 12
    for w in HISTORY_WINDOWS:
        values[pos] = hist.trailing_mean(day, w)
        pos += 1

    if competitors:
        views = [SeriesHistory.of(c) for c in competitors]
        values[pos] = float(np.mean([v.price_on(day) for v in views]))
        values[pos + 1] = float(np.mean([v.trailing_mean_or_zero(day, 7) for v in views]))
    pos += 2

    strength = 0.0
    for kind in KIND_ORDER:
        statuses: list[LifecycleStatus] = []
        value_sum = 0.0
        trigger_max = 0.0
        for promo in promotions:
            if promo.kind is not kind:
                continue
            status = lifecycle_status(promo, day, window_days)
            statuses.append(status)
            if status is LifecycleStatus.ACTIVE:
                value_sum += promotion_value(promo, price_scale, conversion)
                trigger_max = max(trigger_max, promo.p_t)
        slot_status = LifecycleStatus.NONE
        for candidate in _STATUS_PRIORITY:
            if candidate in statuses:
                slot_status = candidate
                break
        values[pos] = float(slot_status)
        values[pos + 1] = value_sum
        values[pos + 2] = trigger_max / price_scale
        pos += 3
        strength += value_sum
    values[pos] = strength
    pos += 1

    assert pos == _LAYOUT_LEN
    return values


_LAYOUT = default_layout()
_LAYOUT_LEN = len(_LAYOUT)


def assemble_features(
    product: Product,
    day: date,
    series: SalesSeries | SeriesHistory,
    promotions: Sequence[PromotionRecord],
    competitors: Sequence[SalesSeries | SeriesHistory],
    embedder: TitleEmbedder,
    conversion: RewardConversion = DEFAULT_CONVERSION,
    window_days: int = DEFAULT_LIFECYCLE_WINDOW,
) -> FeatureVector:
    values = feature_values(
        product, day, series, promotions, competitors, embedder, conversion, window_days
    )
    return FeatureVector(values=tuple(values), group_map=dict(_LAYOUT.groups))
