import { describe, expect, it } from "vitest";
import {
  annularSectorPath,
  dayAngle,
  dayIndexInYear,
  daysInYear,
  polarPoint,
  radialDayPosition,
  ringForDate,
  type RadialCalendar,
} from "../src/layout/radial.js";

const CALENDAR: RadialCalendar = {
  previousYear: 2023,
  currentYear: 2024,
  inner: { r0: 100, r1: 140 },
  outer: { r0: 150, r1: 190 },
};

describe("dayAngle", () => {
  it("puts January 1 at twelve o'clock", () => {
    expect(dayAngle("2023-01-01")).toBe(0);
    expect(dayAngle("2024-01-01")).toBe(0);
  });

  it("puts the middle of a plain year within 0.02 rad of pi", () => {
    // 2023-07-02 is day index 182 of 365
    expect(dayIndexInYear("2023-07-02")).toBe(182);
    expect(Math.abs(dayAngle("2023-07-02") - Math.PI)).toBeLessThan(0.02);
  });

  it("keeps December 31 just short of a full turn", () => {
    const plain = dayAngle("2023-12-31");
    expect(plain).toBeCloseTo((2 * Math.PI * 364) / 365, 12);
    expect(plain).toBeLessThan(2 * Math.PI);
    const leap = dayAngle("2024-12-31");
    expect(leap).toBeCloseTo((2 * Math.PI * 365) / 366, 12);
  });

  it("spaces leap years over 366 slots", () => {
    expect(daysInYear(2024)).toBe(366);
    expect(daysInYear(2023)).toBe(365);
    expect(daysInYear(2000)).toBe(366);
    expect(daysInYear(1900)).toBe(365);
    // Mar 1 lands one slot later in a leap year
    expect(dayIndexInYear("2024-03-01")).toBe(60);
    expect(dayIndexInYear("2023-03-01")).toBe(59);
  });

  it("rejects garbage dates", () => {
    expect(() => dayAngle("2023-13-01")).toThrow(RangeError);
    expect(() => dayAngle("2023-02-30")).toThrow(RangeError);
    expect(() => dayAngle("yesterday")).toThrow(RangeError);
  });
});

describe("radialDayPosition", () => {
  it("places a day on the midline of its ring", () => {
    const inner = radialDayPosition("2023-06-15", "inner", CALENDAR);
    expect(inner.radius).toBe(120);
    expect(inner.ring).toBe("inner");
    const outer = radialDayPosition("2024-06-15", "outer", CALENDAR);
    expect(outer.radius).toBe(170);
  });

  it("gives the same season the same angle on both rings", () => {
    const before = radialDayPosition("2023-10-01", "inner", CALENDAR);
    const after = radialDayPosition("2024-10-01", "outer", CALENDAR);
    expect(Math.abs(before.angle - after.angle)).toBeLessThan(0.02);
  });

  it("rejects dates outside the ring's year", () => {
    expect(() => radialDayPosition("2022-06-15", "inner", CALENDAR)).toThrow(RangeError);
    expect(() => radialDayPosition("2023-06-15", "outer", CALENDAR)).toThrow(RangeError);
    expect(() => radialDayPosition("2025-01-01", "outer", CALENDAR)).toThrow(RangeError);
  });

  it("maps dates to rings through the window, null outside it", () => {
    expect(ringForDate("2023-05-04", CALENDAR)).toBe("inner");
    expect(ringForDate("2024-05-04", CALENDAR)).toBe("outer");
    expect(ringForDate("2022-12-31", CALENDAR)).toBeNull();
    expect(ringForDate("2025-01-01", CALENDAR)).toBeNull();
  });
});

describe("polarPoint", () => {
  it("walks clockwise from the top", () => {
    const [xTop, yTop] = polarPoint(0, 0, 0, 10);
    expect(xTop).toBeCloseTo(0, 12);
    expect(yTop).toBeCloseTo(-10, 12);
    const [xRight, yRight] = polarPoint(0, 0, Math.PI / 2, 10);
    expect(xRight).toBeCloseTo(10, 12);
    expect(yRight).toBeCloseTo(0, 12);
    const [xBottom, yBottom] = polarPoint(0, 0, Math.PI, 10);
    expect(xBottom).toBeCloseTo(0, 12);
    expect(yBottom).toBeCloseTo(10, 12);
  });
});

describe("annularSectorPath", () => {
  it("emits a closed path with two arcs", () => {
    const path = annularSectorPath(0, 0, 5, 10, 0, Math.PI / 2);
    expect(path.startsWith("M")).toBe(true);
    expect(path.endsWith("Z")).toBe(true);
    expect(path.match(/A/g)).toHaveLength(2);
    // quarter turn is a small arc
    expect(path).toContain(" 0 0 1 ");
  });

  it("sets the large-arc flag past half a turn", () => {
    const path = annularSectorPath(0, 0, 5, 10, 0, 1.5 * Math.PI);
    expect(path).toContain(" 0 1 1 ");
  });
});
