"""Promotion text parsing, lifecycle status, and strength aggregation."""

from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from promoforecast.domain import PromotionKind, PromotionRecord
from promoforecast.promos import (
    DEFAULT_LIFECYCLE_WINDOW,
    LifecycleStatus,
    RewardConversion,
    UnrecognizedPromotion,
    lifecycle_status,
    normalized_reward,
    parse_promotion,
    promotion_strength,
    render_promotion,
)


def promo_record(raw_text, start, end, enabled=True, pid="x", product_id="p"):
    parsed = parse_promotion(raw_text)
    return PromotionRecord(
        id=pid,
        product_id=product_id,
        raw_text=raw_text,
        kind=parsed.kind,
        k_d=parsed.k_d,
        p_t=parsed.p_t,
        reward=parsed.reward,
        flash_hours=parsed.flash_hours,
        start=start,
        end=end,
        enabled=enabled,
    )


class TestParseGoldenForms:
    """The six canonical campaign texts, one per grammar."""

    def test_value_discount(self):
        p = parse_promotion("$10 Off Orders Over $69")
        assert p.kind is PromotionKind.VALUE_DISCOUNT
        assert p.k_d == 10 / 69
        assert p.p_t == 69.0
        assert p.reward == 0.0

    def test_percentage_discount(self):
        p = parse_promotion("20% Off")
        assert p.kind is PromotionKind.PERCENTAGE_DISCOUNT
        assert p.k_d == 0.20
        assert p.p_t == 0.0
        assert p.reward == 0.0

    def test_flash_sale(self):
        p = parse_promotion("30% Off in 4 Hours")
        assert p.kind is PromotionKind.FLASH_SALE
        assert p.k_d == 0.30
        assert p.flash_hours == 4.0

    def test_loyalty_points(self):
        p = parse_promotion("100 Loyalty Points Back")
        assert p.kind is PromotionKind.LOYALTY_POINTS
        assert p.k_d == 0.0
        assert p.reward == 100.0

    def test_free_shipping(self):
        p = parse_promotion("Free Shipping on Orders Over $99")
        assert p.kind is PromotionKind.FREE_SHIPPING
        assert p.k_d == 0.0
        assert p.p_t == 99.0
        assert p.reward > 0

    def test_installment(self):
        p = parse_promotion("6 Months Interest-free Installment")
        assert p.kind is PromotionKind.INTEREST_FREE_INSTALLMENT
        assert p.k_d == 0.0
        assert p.reward == 6.0


class TestParseVariants:
    def test_cny_amounts_give_same_rate_as_percent(self):
        value = parse_promotion("30 CNY Off Orders Over 300 CNY")
        percent = parse_promotion("10% Off")
        assert value.k_d == percent.k_d == 0.1

    def test_case_and_whitespace_insensitive(self):
        a = parse_promotion("20% off")
        b = parse_promotion("  20%   OFF ")
        assert a == b

    def test_free_shipping_without_trigger(self):
        p = parse_promotion("Free Shipping")
        assert p.kind is PromotionKind.FREE_SHIPPING
        assert p.p_t == 0.0

    def test_decimal_amounts(self):
        p = parse_promotion("$7.50 Off Orders Over $50")
        assert p.k_d == 7.5 / 50
        assert p.p_t == 50.0


class TestParseRejections:
    def test_unknown_grammar(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("Buy one get one ☺")

    def test_empty_text(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("   ")

    def test_percentage_above_hundred(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("150% Off")

    def test_zero_percent(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("0% Off")

    def test_discount_exceeding_trigger(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("$500 Off Orders Over $100")

    def test_zero_trigger(self):
        with pytest.raises(UnrecognizedPromotion):
            parse_promotion("$5 Off Orders Over $0")


# Strategies rendering random parameters into each grammar template. Numbers
# are drawn so that the rendered text is bit-stable under float('%g' % x).
_ints = st.integers(min_value=1, max_value=10_000)
_cents = st.integers(min_value=1, max_value=1_000_000).map(lambda c: c / 100)


def _render_cases():
    return st.one_of(
        st.tuples(_cents, _cents).filter(lambda t: 0 < t[0] / t[1] <= 1).map(
            lambda t: (
                PromotionKind.VALUE_DISCOUNT,
                render_promotion(PromotionKind.VALUE_DISCOUNT, amount=t[0], trigger=t[1]),
                {"k_d": t[0] / t[1], "p_t": t[1]},
            )
        ),
        st.integers(1, 100).map(
            lambda pct: (
                PromotionKind.PERCENTAGE_DISCOUNT,
                render_promotion(PromotionKind.PERCENTAGE_DISCOUNT, percent=pct),
                {"k_d": pct / 100},
            )
        ),
        st.tuples(st.integers(1, 100), st.integers(1, 72)).map(
            lambda t: (
                PromotionKind.FLASH_SALE,
                render_promotion(PromotionKind.FLASH_SALE, percent=t[0], hours=t[1]),
                {"k_d": t[0] / 100, "flash_hours": float(t[1])},
            )
        ),
        _ints.map(
            lambda pts: (
                PromotionKind.LOYALTY_POINTS,
                render_promotion(PromotionKind.LOYALTY_POINTS, points=pts),
                {"reward": float(pts)},
            )
        ),
        _cents.map(
            lambda amt: (
                PromotionKind.FREE_SHIPPING,
                render_promotion(PromotionKind.FREE_SHIPPING, trigger=amt),
                {"p_t": amt},
            )
        ),
        st.integers(1, 48).map(
            lambda months: (
                PromotionKind.INTEREST_FREE_INSTALLMENT,
                render_promotion(PromotionKind.INTEREST_FREE_INSTALLMENT, months=months),
                {"reward": float(months)},
            )
        ),
    )


class TestParseProperties:
    @given(_render_cases())
    @settings(max_examples=300)
    def test_render_then_parse_recovers_parameters(self, case):
        kind, text, expected = case
        parsed = parse_promotion(text)
        assert parsed.kind is kind
        for field, value in expected.items():
            assert getattr(parsed, field) == value

    @given(_render_cases())
    @settings(max_examples=300)
    def test_rate_always_in_unit_interval(self, case):
        parsed = parse_promotion(case[1])
        assert 0.0 <= parsed.k_d <= 1.0


class TestLifecycleStatus:
    def _promo(self, enabled=True):
        return promo_record(
            "20% Off", date(2024, 5, 10), date(2024, 5, 14), enabled=enabled
        )

    def test_start_day_is_active(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 10)) is LifecycleStatus.ACTIVE

    def test_end_day_is_active(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 14)) is LifecycleStatus.ACTIVE

    def test_day_before_start_is_pre(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 9)) is LifecycleStatus.PRE

    def test_window_edge_is_pre(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 7)) is LifecycleStatus.PRE

    def test_past_window_is_none(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 18)) is LifecycleStatus.NONE

    def test_post_window(self):
        assert lifecycle_status(self._promo(), date(2024, 5, 17)) is LifecycleStatus.POST

    def test_disabled_is_always_none(self):
        promo = self._promo(enabled=False)
        for offset in range(-5, 10):
            day = date(2024, 5, 10) + timedelta(days=offset)
            assert lifecycle_status(promo, day) is LifecycleStatus.NONE

    def test_zero_window_has_no_shoulders(self):
        promo = self._promo()
        assert lifecycle_status(promo, date(2024, 5, 9), 0) is LifecycleStatus.NONE
        assert lifecycle_status(promo, date(2024, 5, 15), 0) is LifecycleStatus.NONE

    def test_negative_window_rejected(self):
        with pytest.raises(ValueError):
            lifecycle_status(self._promo(), date(2024, 5, 10), -1)

    @given(
        start_offset=st.integers(0, 60),
        duration=st.integers(0, 30),
        window=st.integers(0, 10),
    )
    @settings(max_examples=200)
    def test_statuses_appear_in_lifecycle_order(self, start_offset, duration, window):
        """Scanning any date range, statuses follow None* Pre* Active* Post* None*."""
        base = date(2024, 1, 1)
        start = base + timedelta(days=start_offset)
        promo = promo_record("20% Off", start, start + timedelta(days=duration))
        seq = [
            lifecycle_status(promo, base + timedelta(days=i), window)
            for i in range(start_offset + duration + window + 10)
        ]
        allowed_next = {
            LifecycleStatus.NONE: {LifecycleStatus.NONE, LifecycleStatus.PRE, LifecycleStatus.ACTIVE},
            LifecycleStatus.PRE: {LifecycleStatus.PRE, LifecycleStatus.ACTIVE},
            LifecycleStatus.ACTIVE: {LifecycleStatus.ACTIVE, LifecycleStatus.POST, LifecycleStatus.NONE},
            LifecycleStatus.POST: {LifecycleStatus.POST, LifecycleStatus.NONE},
        }
        for a, b in zip(seq, seq[1:]):
            assert b in allowed_next[a], seq
        # Exactly one contiguous active stretch covering the span.
        active_days = [i for i, s in enumerate(seq) if s is LifecycleStatus.ACTIVE]
        assert len(active_days) == duration + 1
        assert active_days == list(range(start_offset, start_offset + duration + 1))


class TestRewardNormalization:
    def test_loyalty_points(self):
        assert normalized_reward(PromotionKind.LOYALTY_POINTS, 100, 100.0) == 0.01 * 100 / 100

    def test_free_shipping(self):
        assert normalized_reward(PromotionKind.FREE_SHIPPING, 1.0, 80.0) == 8.0 / 80.0

    def test_installment_ignores_price(self):
        assert normalized_reward(PromotionKind.INTEREST_FREE_INSTALLMENT, 6, 50.0) == 0.03

    def test_custom_conversion(self):
        conv = RewardConversion(points_to_currency=0.05)
        assert normalized_reward(PromotionKind.LOYALTY_POINTS, 10, 10.0, conv) == 0.05

    def test_nonpositive_price_rejected(self):
        with pytest.raises(ValueError):
            normalized_reward(PromotionKind.LOYALTY_POINTS, 10, 0.0)

    def test_direct_kind_rejected(self):
        with pytest.raises(ValueError):
            normalized_reward(PromotionKind.PERCENTAGE_DISCOUNT, 1, 10.0)


class TestPromotionStrength:
    def test_no_active_promotions(self):
        promo = promo_record("20% Off", date(2024, 5, 1), date(2024, 5, 5))
        assert promotion_strength([promo], date(2024, 6, 1), 100.0) == 0.0

    def test_single_direct(self):
        promo = promo_record("20% Off", date(2024, 5, 1), date(2024, 5, 5))
        assert promotion_strength([promo], date(2024, 5, 3), 100.0) == 0.20

    def test_direct_plus_indirect(self):
        span = (date(2024, 5, 1), date(2024, 5, 5))
        promos = [
            promo_record("20% Off", *span, pid="a"),
            promo_record("100 Loyalty Points Back", *span, pid="b"),
        ]
        got = promotion_strength(promos, date(2024, 5, 3), 100.0)
        assert got == 0.20 + (100 * 0.01) / 100

    def test_pre_window_does_not_count(self):
        promo = promo_record("20% Off", date(2024, 5, 10), date(2024, 5, 14))
        assert promotion_strength([promo], date(2024, 5, 9), 100.0) == 0.0

    def test_overlapping_same_kind_sum(self):
        span = (date(2024, 5, 1), date(2024, 5, 5))
        promos = [
            promo_record("10% Off", *span, pid="a"),
            promo_record("15% Off", *span, pid="b"),
        ]
        assert promotion_strength(promos, date(2024, 5, 2), 100.0) == pytest.approx(0.25)


class TestRenderTemplates:
    def test_templates_round_trip_the_golden_texts(self):
        cases = {
            render_promotion(PromotionKind.VALUE_DISCOUNT, amount=10, trigger=69):
                "$10 Off Orders Over $69",
            render_promotion(PromotionKind.PERCENTAGE_DISCOUNT, percent=20): "20% Off",
            render_promotion(PromotionKind.FLASH_SALE, percent=30, hours=4):
                "30% Off in 4 Hours",
            render_promotion(PromotionKind.LOYALTY_POINTS, points=100):
                "100 Loyalty Points Back",
            render_promotion(PromotionKind.FREE_SHIPPING, trigger=99):
                "Free Shipping on Orders Over $99",
            render_promotion(PromotionKind.INTEREST_FREE_INSTALLMENT, months=6):
                "6 Months Interest-free Installment",
        }
        for rendered, expected in cases.items():
            assert rendered == expected
