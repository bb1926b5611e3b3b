"""Promotion-text quantification and per-day lifecycle tracking.

Six campaign grammars are recognized (see ``docs/promotion_grammars.md`` for
the exact templates). Direct discounts are quantified as the fraction of
price saved (``k_d``); indirect ones carry their stated reward quantity and
are converted to a price-fraction scale by :class:`RewardConversion` when a
single strength scalar is needed.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Sequence

from .domain import PromotionKind, PromotionRecord

__all__ = [
    "UnrecognizedPromotion",
    "ParsedPromotion",
    "parse_promotion",
    "LifecycleStatus",
    "lifecycle_status",
    "RewardConversion",
    "normalized_reward",
    "promotion_strength",
    "DEFAULT_LIFECYCLE_WINDOW",
    "GRAMMAR_TEMPLATES",
]

DEFAULT_LIFECYCLE_WINDOW = 3

# Bit-exact render templates for the six grammars; the parser accepts these
# with arbitrary positive numbers, any casing, and $/CNY/RMB markers.
GRAMMAR_TEMPLATES = {
    PromotionKind.VALUE_DISCOUNT: "${amount} Off Orders Over ${trigger}",
    PromotionKind.PERCENTAGE_DISCOUNT: "{percent}% Off",
    PromotionKind.FLASH_SALE: "{percent}% Off in {hours} Hours",
    PromotionKind.LOYALTY_POINTS: "{points} Loyalty Points Back",
    PromotionKind.FREE_SHIPPING: "Free Shipping on Orders Over ${trigger}",
    PromotionKind.INTEREST_FREE_INSTALLMENT: "{months} Months Interest-free Installment",
}


class UnrecognizedPromotion(ValueError):
    """Raised when text matches none of the six grammars (or yields an
    out-of-range discount). Callers must skip the record with a warning,
    never silently zero it."""


@dataclass(frozen=True, slots=True)
class ParsedPromotion:
    kind: PromotionKind
    k_d: float
    p_t: float
    reward: float
    flash_hours: float = 0.0


_NUM = r"(\d+(?:\.\d+)?)"
# A currency amount: optional $ prefix, optional CNY/RMB suffix.
_MONEY = r"(?:[$￥¥]\s*)?" + _NUM + r"\s*(?:CNY|RMB)?"

_PATTERNS: list[tuple[PromotionKind, re.Pattern[str]]] = [
    (
        PromotionKind.FLASH_SALE,
        re.compile(rf"^{_NUM}\s*%\s*off\s+in\s+{_NUM}\s*hours?$", re.IGNORECASE),
    ),
    (
        PromotionKind.PERCENTAGE_DISCOUNT,
        re.compile(rf"^{_NUM}\s*%\s*off$", re.IGNORECASE),
    ),
    (
        PromotionKind.VALUE_DISCOUNT,
        re.compile(rf"^{_MONEY}\s+off\s+orders?\s+over\s+{_MONEY}$", re.IGNORECASE),
    ),
    (
        PromotionKind.LOYALTY_POINTS,
        re.compile(rf"^{_NUM}\s+loyalty\s+points?\s+back$", re.IGNORECASE),
    ),
    (
        PromotionKind.FREE_SHIPPING,
        re.compile(rf"^free\s+shipping(?:\s+on\s+orders?\s+over\s+{_MONEY})?$", re.IGNORECASE),
    ),
    (
        PromotionKind.INTEREST_FREE_INSTALLMENT,
        re.compile(rf"^{_NUM}\s+months?\s+interest[\s-]?free\s+installments?$", re.IGNORECASE),
    ),
]


def parse_promotion(raw_text: str) -> ParsedPromotion:
    """Parse campaign text into (kind, k_d, p_t, reward, flash_hours).

    Raises :class:`UnrecognizedPromotion` for text outside the six grammars
    and for direct discounts whose implied rate falls outside (0, 1].
    """
    text = " ".join(raw_text.split())
    if not text:
        raise UnrecognizedPromotion("empty promotion text")

    for kind, pattern in _PATTERNS:
        m = pattern.match(text)
        if m is None:
            continue
        if kind is PromotionKind.FLASH_SALE:
            percent, hours = float(m.group(1)), float(m.group(2))
            k_d = percent / 100.0
            _check_rate(raw_text, k_d)
            return ParsedPromotion(kind, k_d=k_d, p_t=0.0, reward=0.0, flash_hours=hours)
        if kind is PromotionKind.PERCENTAGE_DISCOUNT:
            k_d = float(m.group(1)) / 100.0
            _check_rate(raw_text, k_d)
            return ParsedPromotion(kind, k_d=k_d, p_t=0.0, reward=0.0)
        if kind is PromotionKind.VALUE_DISCOUNT:
            amount, trigger = float(m.group(1)), float(m.group(2))
            if trigger <= 0:
                raise UnrecognizedPromotion(
                    f"value discount needs a positive trigger amount: {raw_text!r}"
                )
            k_d = amount / trigger
            _check_rate(raw_text, k_d)
            return ParsedPromotion(kind, k_d=k_d, p_t=trigger, reward=0.0)
        if kind is PromotionKind.LOYALTY_POINTS:
            return ParsedPromotion(kind, k_d=0.0, p_t=0.0, reward=float(m.group(1)))
        if kind is PromotionKind.FREE_SHIPPING:
            trigger = float(m.group(1)) if m.group(1) else 0.0
            return ParsedPromotion(kind, k_d=0.0, p_t=trigger, reward=1.0)
        if kind is PromotionKind.INTEREST_FREE_INSTALLMENT:
            return ParsedPromotion(kind, k_d=0.0, p_t=0.0, reward=float(m.group(1)))

    raise UnrecognizedPromotion(f"unrecognized promotion text: {raw_text!r}")


def _check_rate(raw_text: str, k_d: float) -> None:
    if not 0.0 < k_d <= 1.0:
        raise UnrecognizedPromotion(
            f"discount rate {k_d:.4f} outside (0, 1] for {raw_text!r}"
        )


class LifecycleStatus(enum.IntEnum):
    NONE = 0
    PRE = 1
    ACTIVE = 2
    POST = 3


def lifecycle_status(
    promotion: PromotionRecord, day: date, window_days: int = DEFAULT_LIFECYCLE_WINDOW
) -> LifecycleStatus:
    """Status flag for one (promotion, day) pair.

    Promotion effects can leak into the ``window_days`` days on either side
    of the campaign span; disabled promotions are always NONE.
    """
    if window_days < 0:
        raise ValueError(f"window_days must be >= 0, got {window_days}")
    if not promotion.enabled:
        return LifecycleStatus.NONE
    if promotion.start <= day <= promotion.end:
        return LifecycleStatus.ACTIVE
    window = timedelta(days=window_days)
    if promotion.start - window <= day < promotion.start:
        return LifecycleStatus.PRE
    if promotion.end < day <= promotion.end + window:
        return LifecycleStatus.POST
    return LifecycleStatus.NONE


@dataclass(frozen=True, slots=True)
class RewardConversion:
    """Converts indirect rewards into a fraction-of-price scale.

    points_to_currency: currency value of one loyalty point.
    shipping_value: flat currency value of free shipping.
    installment_monthly_rate: financing value per installment month,
        expressed as a fraction of the product price.
    """

    points_to_currency: float = 0.01
    shipping_value: float = 8.0
    installment_monthly_rate: float = 0.005


DEFAULT_CONVERSION = RewardConversion()


def normalized_reward(
    kind: PromotionKind,
    reward: float,
    base_price: float,
    conversion: RewardConversion = DEFAULT_CONVERSION,
) -> float:
    """The indirect-kind analogue of k_d: reward as a fraction of price."""
    if base_price <= 0:
        raise ValueError(f"base_price must be positive, got {base_price}")
    if kind is PromotionKind.LOYALTY_POINTS:
        return reward * conversion.points_to_currency / base_price
    if kind is PromotionKind.FREE_SHIPPING:
        return reward * conversion.shipping_value / base_price
    if kind is PromotionKind.INTEREST_FREE_INSTALLMENT:
        return reward * conversion.installment_monthly_rate
    raise ValueError(f"{kind} is not an indirect promotion kind")


def promotion_value(
    promo: PromotionRecord,
    base_price: float,
    conversion: RewardConversion = DEFAULT_CONVERSION,
) -> float:
    """Price-fraction value of one promotion: k_d or the normalized reward."""
    if promo.kind.is_direct:
        return promo.k_d
    return normalized_reward(promo.kind, promo.reward, base_price, conversion)


def promotion_strength(
    promotions: Iterable[PromotionRecord],
    day: date,
    base_price: float,
    conversion: RewardConversion = DEFAULT_CONVERSION,
) -> float:
    """Aggregate strength of all promotions active on ``day``.

    Direct kinds contribute k_d; indirect kinds contribute their normalized
    reward. Overlapping promotions sum.
    """
    total = 0.0
    for promo in promotions:
        if lifecycle_status(promo, day, 0) is LifecycleStatus.ACTIVE:
            total += promotion_value(promo, base_price, conversion)
    return total


def render_promotion(kind: PromotionKind, **params: float) -> str:
    """Render parameters into the kind's exact grammar template."""

    def fmt(x: float) -> str:
        return f"{x:g}"

    return GRAMMAR_TEMPLATES[kind].format(
        **{key: fmt(value) for key, value in params.items()}
    )
