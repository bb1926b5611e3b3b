"""Scenario editing and re-forecasting.

A scenario is an ordered list of edits against one product's promotion
timeline plus a horizon to re-forecast. Edits build a new timeline; the
dataset is never touched, so any number of scenarios can run against the
same data and the baseline stays reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from datetime import date
from typing import Mapping, Sequence

from .analytics import UndefinedGrowth, growth_rate
from .domain import ForecastResult, ModelKind, PromotionRecord
from .explain import Background
from .pipeline import DEFAULT_HORIZON_CAP, ForecastContext, forecast
from .promos import parse_promotion

__all__ = [
    "EditOp",
    "InvalidEdit",
    "Scenario",
    "ScenarioComparison",
    "ScenarioEdit",
    "ScenarioRun",
    "UnknownEditTarget",
    "apply_edits",
    "compare",
    "edit_from_wire",
    "edit_to_wire",
    "promotion_to_wire",
    "run_scenario",
    "scenario_from_wire",
    "scenario_to_wire",
]


class EditOp(enum.Enum):
    ADD = "Add"
    DELETE = "Delete"
    MODIFY = "Modify"
    TOGGLE = "Toggle"
    SHIFT = "Shift"


class UnknownEditTarget(ValueError):
    """Edit names a promotion id that is not in the timeline."""


class InvalidEdit(ValueError):
    """Edit payload is incomplete or inconsistent for its op."""


@dataclass(frozen=True)
class ScenarioEdit:
    """One timeline operation. Which fields matter depends on ``op``:

    - Add: raw_text, start, end required; enabled and new_id optional
    - Delete / Toggle: target required
    - Modify: target plus any of raw_text, start, end, enabled
    - Shift: target and start required; end optional (defaults to
      preserving the original duration)
    """

    op: EditOp
    target: str | None = None
    raw_text: str | None = None
    start: date | None = None
    end: date | None = None
    enabled: bool | None = None
    new_id: str | None = None


@dataclass(frozen=True)
class Scenario:
    product_id: str
    start: date
    end: date
    model_kind: ModelKind
    edits: tuple[ScenarioEdit, ...] = ()


@dataclass(frozen=True)
class ScenarioComparison:
    """Scenario-minus-baseline deltas plus campaign-start growth rates
    measured on each timeline's own predictions."""

    horizon: tuple[date, ...]
    deltas: tuple[float, ...]
    total_delta: float
    growth_before: dict[str, float]
    growth_after: dict[str, float]


@dataclass(frozen=True)
class ScenarioRun:
    baseline: ForecastResult
    edited: ForecastResult
    promotions_before: tuple[PromotionRecord, ...]
    promotions_after: tuple[PromotionRecord, ...]

    def comparison(self) -> ScenarioComparison:
        return compare(
            self.baseline, self.edited, self.promotions_before, self.promotions_after
        )


# --- edit application --------------------------------------------------------


def _record_from_text(
    promo_id: str, product_id: str, raw_text: str, start: date, end: date, enabled: bool
) -> PromotionRecord:
    parsed = parse_promotion(raw_text)
    return PromotionRecord(
        id=promo_id,
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


def _require_target(edit: ScenarioEdit, ids: Sequence[str]) -> str:
    if edit.target is None:
        raise InvalidEdit(f"{edit.op.value} needs a target promotion id")
    if edit.target not in ids:
        raise UnknownEditTarget(f"no promotion {edit.target!r} in the timeline")
    return edit.target


def apply_edits(
    promotions: Sequence[PromotionRecord],
    edits: Sequence[ScenarioEdit],
    product_id: str | None = None,
) -> tuple[PromotionRecord, ...]:
    """New timeline with the edits applied in order; the input is never
    modified. ``product_id`` seeds added campaigns when their payload does
    not say otherwise."""
    timeline = list(promotions)
    added = 0
    for edit in edits:
        ids = [p.id for p in timeline]
        if edit.op is EditOp.ADD:
            if edit.raw_text is None or edit.start is None or edit.end is None:
                raise InvalidEdit("Add needs raw_text, start, and end")
            if edit.end < edit.start:
                raise InvalidEdit(f"campaign ends {edit.end} before it starts {edit.start}")
            new_id = edit.new_id or f"scenario-add-{added}"
            added += 1
            if new_id in ids:
                raise InvalidEdit(f"promotion id {new_id!r} already exists")
            pid = product_id or (timeline[0].product_id if timeline else "")
            timeline.append(
                _record_from_text(
                    new_id, pid, edit.raw_text, edit.start, edit.end,
                    True if edit.enabled is None else edit.enabled,
                )
            )
        elif edit.op is EditOp.DELETE:
            target = _require_target(edit, ids)
            timeline = [p for p in timeline if p.id != target]
        elif edit.op is EditOp.TOGGLE:
            target = _require_target(edit, ids)
            i = ids.index(target)
            timeline[i] = timeline[i].with_enabled(not timeline[i].enabled)
        elif edit.op is EditOp.MODIFY:
            target = _require_target(edit, ids)
            i = ids.index(target)
            old = timeline[i]
            start = edit.start if edit.start is not None else old.start
            end = edit.end if edit.end is not None else old.end
            if end < start:
                raise InvalidEdit(f"campaign ends {end} before it starts {start}")
            enabled = edit.enabled if edit.enabled is not None else old.enabled
            if edit.raw_text is not None:
                timeline[i] = _record_from_text(
                    old.id, old.product_id, edit.raw_text, start, end, enabled
                )
            else:
                timeline[i] = replace(old, start=start, end=end, enabled=enabled)
        elif edit.op is EditOp.SHIFT:
            target = _require_target(edit, ids)
            if edit.start is None:
                raise InvalidEdit("Shift needs a new start date")
            i = ids.index(target)
            old = timeline[i]
            end = edit.end if edit.end is not None else edit.start + (old.end - old.start)
            if end < edit.start:
                raise InvalidEdit(f"campaign ends {end} before it starts {edit.start}")
            timeline[i] = old.with_dates(edit.start, end)
        else:  # pragma: no cover - enum is closed
            raise InvalidEdit(f"unsupported op {edit.op!r}")
    return tuple(timeline)


# --- scenario evaluation -----------------------------------------------------


def run_scenario(
    context: ForecastContext,
    scenario: Scenario,
    model,
    background: Background,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
    baseline: ForecastResult | None = None,
) -> ScenarioRun:
    """Forecast the horizon twice, on the stored timeline and on the edited
    one, through the same code path; a zero-edit scenario therefore
    reproduces the baseline bit for bit.

    A ``baseline`` from an earlier run over the same horizon and model may
    be passed in to skip recomputing it; forecasting is deterministic, so
    the result is unchanged.
    """
    if ModelKind(model.kind) is not scenario.model_kind:
        raise ValueError(
            f"scenario wants {scenario.model_kind.value}, model is {ModelKind(model.kind).value}"
        )
    before = context.promotions(scenario.product_id)
    after = apply_edits(before, scenario.edits, product_id=scenario.product_id)
    if baseline is None:
        baseline = forecast(
            context, scenario.product_id, model, scenario.start, scenario.end,
            background, promotions=before, horizon_cap=horizon_cap,
        )
    edited = forecast(
        context, scenario.product_id, model, scenario.start, scenario.end,
        background, promotions=after, horizon_cap=horizon_cap,
    )
    return ScenarioRun(
        baseline=baseline,
        edited=edited,
        promotions_before=before,
        promotions_after=after,
    )


def _campaign_growth(
    result: ForecastResult, promotions: Sequence[PromotionRecord]
) -> dict[str, float]:
    """Growth of predicted sales at each enabled campaign's start day;
    campaigns whose start (or the day before) lies outside the horizon, or
    whose previous-day prediction is zero, are skipped."""
    by_day: Mapping[date, float] = dict(zip(result.horizon, result.predictions))
    rates: dict[str, float] = {}
    for promo in promotions:
        if not promo.enabled:
            continue
        try:
            rates[promo.id] = growth_rate(by_day, promo.start)
        except (UndefinedGrowth, ValueError):
            continue
    return rates


def compare(
    baseline: ForecastResult,
    edited: ForecastResult,
    promotions_before: Sequence[PromotionRecord],
    promotions_after: Sequence[PromotionRecord],
) -> ScenarioComparison:
    if baseline.horizon != edited.horizon:
        raise ValueError("results cover different horizons")
    if baseline.model_kind is not edited.model_kind:
        raise ValueError("results come from different model kinds")
    deltas = tuple(
        s - b for s, b in zip(edited.predictions, baseline.predictions)
    )
    return ScenarioComparison(
        horizon=baseline.horizon,
        deltas=deltas,
        total_delta=float(sum(deltas)),
        growth_before=_campaign_growth(baseline, promotions_before),
        growth_after=_campaign_growth(edited, promotions_after),
    )


# --- wire format -------------------------------------------------------------


def promotion_to_wire(promo: PromotionRecord) -> dict:
    return {
        "id": promo.id,
        "product_id": promo.product_id,
        "raw_text": promo.raw_text,
        "kind": promo.kind.value,
        "k_d": promo.k_d,
        "p_t": promo.p_t,
        "reward": promo.reward,
        "flash_hours": promo.flash_hours,
        "start": promo.start.isoformat(),
        "end": promo.end.isoformat(),
        "enabled": promo.enabled,
    }


def edit_to_wire(edit: ScenarioEdit) -> dict:
    doc: dict = {"op": edit.op.value}
    if edit.target is not None:
        doc["target"] = edit.target
    if edit.raw_text is not None:
        doc["raw_text"] = edit.raw_text
    if edit.start is not None:
        doc["start"] = edit.start.isoformat()
    if edit.end is not None:
        doc["end"] = edit.end.isoformat()
    if edit.enabled is not None:
        doc["enabled"] = edit.enabled
    if edit.new_id is not None:
        doc["new_id"] = edit.new_id
    return doc


def edit_from_wire(doc: Mapping) -> ScenarioEdit:
    try:
        op = EditOp(doc["op"])
    except (KeyError, ValueError):
        raise InvalidEdit(f"unknown edit op {doc.get('op')!r}") from None

    def opt_date(key: str) -> date | None:
        raw = doc.get(key)
        if raw is None:
            return None
        try:
            return date.fromisoformat(raw)
        except (TypeError, ValueError):
            raise InvalidEdit(f"bad {key} {raw!r}: expected YYYY-MM-DD") from None

    return ScenarioEdit(
        op=op,
        target=doc.get("target"),
        raw_text=doc.get("raw_text"),
        start=opt_date("start"),
        end=opt_date("end"),
        enabled=doc.get("enabled"),
        new_id=doc.get("new_id"),
    )


def scenario_to_wire(scenario: Scenario) -> dict:
    return {
        "product_id": scenario.product_id,
        "horizon": {"start": scenario.start.isoformat(), "end": scenario.end.isoformat()},
        "model_kind": scenario.model_kind.value,
        "edits": [edit_to_wire(e) for e in scenario.edits],
    }


def scenario_from_wire(doc: Mapping) -> Scenario:
    try:
        horizon = doc["horizon"]
        start = date.fromisoformat(horizon["start"])
        end = date.fromisoformat(horizon["end"])
        kind = ModelKind(doc["model_kind"])
        product_id = doc["product_id"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidEdit(f"malformed scenario: {exc}") from None
    edits = tuple(edit_from_wire(e) for e in doc.get("edits", []))
    return Scenario(
        product_id=product_id, start=start, end=end, model_kind=kind, edits=edits
    )
