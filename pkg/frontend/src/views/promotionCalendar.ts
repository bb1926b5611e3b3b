/** Two-ring radial calendar of a product's promotion history.
 *
 * Each ring is a year (inner the previous one, outer the current one)
 * and each active promotion day draws a thin radial bar, coloured by
 * kind and stacked outward in a fixed kind order so the same kind
 * always sits at the same depth. A line chart of the current year's
 * daily sales runs inside the hub; promotion-dense angles lining up
 * with sales bumps is exactly the pattern this view exists to show.
 */

import {
  annularSectorPath,
  dayAngle,
  daysInYear,
  polarPoint,
  ringForDate,
  type RadialCalendar,
  type Ring,
} from "../layout/radial.js";
import { linePath, px } from "../scale.js";
import { el, series, svgDoc } from "../svg.js";
import type { PromotionKind, PromotionWire, SalesDay } from "../wire.js";

/** Stacking order, innermost first; never reordered. */
export const KIND_ORDER: readonly PromotionKind[] = [
  "ValueDiscount",
  "PercentageDiscount",
  "FlashSale",
  "LoyaltyPoints",
  "FreeShipping",
  "InterestFreeInstallment",
];

export interface CalendarOptions {
  readonly size: number;
  readonly currentYear: number;
  /** Kinds switched off in the legend. */
  readonly disabled?: ReadonlySet<PromotionKind>;
}

export interface PromotionCalendar {
  readonly svg: string;
  readonly calendar: RadialCalendar;
  /** Kinds that actually occur, in stacking order, for the legend. */
  readonly kinds: readonly PromotionKind[];
}

const MS_PER_DAY = 86_400_000;

function isoDaysBetween(start: string, end: string): string[] {
  const first = Date.parse(`${start}T00:00:00Z`);
  const last = Date.parse(`${end}T00:00:00Z`);
  const days: string[] = [];
  for (let t = first; t <= last; t += MS_PER_DAY) {
    days.push(new Date(t).toISOString().slice(0, 10));
  }
  return days;
}

/** kind -> ring -> day angle list, honouring the enabled flag. */
function activeDays(
  promotions: readonly PromotionWire[],
  calendar: RadialCalendar,
): Map<PromotionKind, Map<Ring, string[]>> {
  const out = new Map<PromotionKind, Map<Ring, string[]>>();
  for (const promo of promotions) {
    if (!promo.enabled) continue;
    for (const day of isoDaysBetween(promo.start, promo.end)) {
      const ring = ringForDate(day, calendar);
      if (ring === null) continue;
      const rings = out.get(promo.kind) ?? new Map<Ring, string[]>();
      const days = rings.get(ring) ?? [];
      days.push(day);
      rings.set(ring, days);
      out.set(promo.kind, rings);
    }
  }
  return out;
}

export function renderPromotionCalendar(
  promotions: readonly PromotionWire[],
  sales: readonly SalesDay[],
  options: CalendarOptions,
): PromotionCalendar {
  const { size, currentYear } = options;
  const disabled = options.disabled ?? new Set<PromotionKind>();
  const c = size / 2;
  const calendar: RadialCalendar = {
    previousYear: currentYear - 1,
    currentYear,
    inner: { r0: size * 0.27, r1: size * 0.36 },
    outer: { r0: size * 0.38, r1: size * 0.47 },
  };

  const byKind = activeDays(promotions, calendar);
  const presentKinds = KIND_ORDER.filter((kind) => byKind.has(kind));

  // How many kinds share a day decides nothing here: every kind owns a
  // fixed slice of the band, so bars never shuffle when one toggles off.
  const sliceCount = KIND_ORDER.length;
  const parts: string[] = [];

  // Month spokes over both rings for orientation.
  const spokes: string[] = [];
  for (let month = 0; month < 12; month++) {
    const angle = dayAngle(`${currentYear}-${String(month + 1).padStart(2, "0")}-01`);
    const [x0, y0] = polarPoint(c, c, angle, calendar.inner.r0);
    const [x1, y1] = polarPoint(c, c, angle, calendar.outer.r1);
    spokes.push(
      el("line", {
        x1: px(x0), y1: px(y0), x2: px(x1), y2: px(y1),
        class: "calendar-spoke",
      }),
    );
  }
  parts.push(el("g", { class: "calendar-grid" }, ...spokes));

  for (const kind of presentKinds) {
    if (disabled.has(kind)) continue;
    const slice = KIND_ORDER.indexOf(kind);
    const bars: string[] = [];
    for (const [ring, days] of byKind.get(kind)!) {
      const band = ring === "inner" ? calendar.inner : calendar.outer;
      const thickness = (band.r1 - band.r0) / sliceCount;
      const r0 = band.r0 + slice * thickness;
      const year = ring === "inner" ? calendar.previousYear : calendar.currentYear;
      const halfDay = Math.PI / daysInYear(year);
      for (const day of days) {
        const angle = dayAngle(day);
        bars.push(
          el("path", {
            d: annularSectorPath(c, c, r0, r0 + thickness, angle - halfDay, angle + halfDay),
            class: `kind-${kind}`,
          }),
        );
      }
    }
    parts.push(series(kind, ...bars));
  }

  // Hub line: current-year daily sales, radius keyed to units sold.
  const hubDays = sales.filter((d) => d.date.startsWith(`${currentYear}-`));
  if (hubDays.length > 1) {
    const peak = Math.max(...hubDays.map((d) => d.units_sold));
    const hubR0 = size * 0.08;
    const hubR1 = size * 0.24;
    const xs: number[] = [];
    const ys: number[] = [];
    for (const day of hubDays) {
      const radius =
        peak > 0 ? hubR0 + (day.units_sold / peak) * (hubR1 - hubR0) : hubR0;
      const [x, y] = polarPoint(c, c, dayAngle(day.date), radius);
      xs.push(x);
      ys.push(y);
    }
    parts.push(
      series("sales", el("path", { d: linePath(xs, ys), class: "hub-sales" })),
    );
  }

  return { svg: svgDoc(size, size, ...parts), calendar, kinds: presentKinds };
}
