/** Radial calendar geometry for the promotion-history view.
 *
 * Two concentric rings each hold one year of days: the inner ring is
 * the previous year, the outer ring the current one. January 1 points
 * straight up and days advance clockwise, one full turn per year, so
 * the same season lands at the same angle in both rings and year-over-
 * year habits line up visually.
 */

import { px } from "../scale.js";

export type Ring = "inner" | "outer";

export interface RingBand {
  /** Inner radius of the band, px. */
  readonly r0: number;
  /** Outer radius of the band, px. */
  readonly r1: number;
}

export interface RadialCalendar {
  /** Year drawn on the inner ring. */
  readonly previousYear: number;
  /** Year drawn on the outer ring. */
  readonly currentYear: number;
  readonly inner: RingBand;
  readonly outer: RingBand;
}

export interface DayPosition {
  /** Radians clockwise from 12 o'clock, in [0, 2*pi). */
  readonly angle: number;
  /** Midline radius of the ring that owns this day, px. */
  readonly radius: number;
  readonly ring: Ring;
}

const MS_PER_DAY = 86_400_000;

function parseIsoDate(iso: string): { year: number; utc: number } {
  const match = /^(\d{4})-(\d{2})-(\d{2})$/.exec(iso);
  if (!match) throw new RangeError(`not an ISO date: ${JSON.stringify(iso)}`);
  const year = Number(match[1]);
  const month = Number(match[2]);
  const day = Number(match[3]);
  const utc = Date.UTC(year, month - 1, day);
  const check = new Date(utc);
  if (check.getUTCMonth() !== month - 1 || check.getUTCDate() !== day) {
    throw new RangeError(`not a calendar date: ${iso}`);
  }
  return { year, utc };
}

export function daysInYear(year: number): number {
  return (year % 4 === 0 && year % 100 !== 0) || year % 400 === 0 ? 366 : 365;
}

/** Zero-based position of the date within its own year. */
export function dayIndexInYear(iso: string): number {
  const { year, utc } = parseIsoDate(iso);
  return Math.round((utc - Date.UTC(year, 0, 1)) / MS_PER_DAY);
}

/** Angle for a date: 2*pi * dayIndex / daysInYear, clockwise from the top. */
export function dayAngle(iso: string): number {
  const { year } = parseIsoDate(iso);
  return (2 * Math.PI * dayIndexInYear(iso)) / daysInYear(year);
}

/**
 * Place a date on the calendar. The date must fall in the year the
 * requested ring displays; anything outside the two-year window is a
 * caller bug and raises.
 */
export function radialDayPosition(
  iso: string,
  ring: Ring,
  calendar: RadialCalendar,
): DayPosition {
  const { year } = parseIsoDate(iso);
  const expected = ring === "inner" ? calendar.previousYear : calendar.currentYear;
  if (year !== expected) {
    throw new RangeError(
      `${iso} is not in ${expected}, the year shown on the ${ring} ring`,
    );
  }
  const band = ring === "inner" ? calendar.inner : calendar.outer;
  return { angle: dayAngle(iso), radius: (band.r0 + band.r1) / 2, ring };
}

/** Ring a date belongs to, or null when it is outside the window. */
export function ringForDate(iso: string, calendar: RadialCalendar): Ring | null {
  const { year } = parseIsoDate(iso);
  if (year === calendar.previousYear) return "inner";
  if (year === calendar.currentYear) return "outer";
  return null;
}

/** Cartesian point for a clockwise-from-top polar coordinate. */
export function polarPoint(
  cx: number,
  cy: number,
  angle: number,
  radius: number,
): [number, number] {
  return [cx + radius * Math.sin(angle), cy - radius * Math.cos(angle)];
}

/**
 * SVG path for an annular sector spanning [a0, a1] radians clockwise
 * from the top between radii r0 and r1. Used for the per-day bars.
 */
export function annularSectorPath(
  cx: number,
  cy: number,
  r0: number,
  r1: number,
  a0: number,
  a1: number,
): string {
  const largeArc = a1 - a0 > Math.PI ? 1 : 0;
  const [x0o, y0o] = polarPoint(cx, cy, a0, r1);
  const [x1o, y1o] = polarPoint(cx, cy, a1, r1);
  const [x1i, y1i] = polarPoint(cx, cy, a1, r0);
  const [x0i, y0i] = polarPoint(cx, cy, a0, r0);
  return (
    `M${px(x0o)},${px(y0o)}` +
    `A${px(r1)},${px(r1)} 0 ${largeArc} 1 ${px(x1o)},${px(y1o)}` +
    `L${px(x1i)},${px(y1i)}` +
    `A${px(r0)},${px(r0)} 0 ${largeArc} 0 ${px(x0i)},${px(y0i)}` +
    "Z"
  );
}
