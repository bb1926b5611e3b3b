/** Box-plot statistics for the competitive-analysis sales strips.
 *
 * Quartiles use the same linear-interpolation rule as the backend's
 * product stats. Whiskers follow the 1.5 * IQR convention: they reach
 * the most extreme values still inside the fences, and anything beyond
 * is listed as an outlier to be drawn as an individual dot.
 */

import { quantileSorted } from "../quantiles.js";

export interface BoxStats {
  /** Low whisker end: smallest value within the lower fence. */
  readonly min: number;
  readonly q1: number;
  readonly median: number;
  readonly q3: number;
  /** High whisker end: largest value within the upper fence. */
  readonly max: number;
  /** Values beyond the fences, ascending. */
  readonly outliers: readonly number[];
}

export function boxPlotStats(values: readonly number[]): BoxStats {
  if (values.length === 0) throw new RangeError("box plot of an empty list");
  const sorted = [...values].sort((a, b) => a - b);
  const q1 = quantileSorted(sorted, 0.25);
  const median = quantileSorted(sorted, 0.5);
  const q3 = quantileSorted(sorted, 0.75);
  const iqr = q3 - q1;
  const loFence = q1 - 1.5 * iqr;
  const hiFence = q3 + 1.5 * iqr;

  const outliers: number[] = [];
  let min = Number.POSITIVE_INFINITY;
  let max = Number.NEGATIVE_INFINITY;
  for (const v of sorted) {
    if (v < loFence || v > hiFence) {
      outliers.push(v);
    } else {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  // Fences always bracket the median, so at least one value is inside.
  return { min, q1, median, q3, max, outliers };
}

/**
 * Slice a series into `count` consecutive windows and box each one.
 * Trailing days that do not fill a window are dropped, matching how the
 * strips bucket a season into equal slices. Windows never share days.
 */
export function boxSeries(values: readonly number[], count: number): BoxStats[] {
  if (!(count >= 1)) throw new RangeError("need at least one window");
  const width = Math.floor(values.length / count);
  if (width === 0) throw new RangeError("more windows than values");
  const boxes: BoxStats[] = [];
  for (let i = 0; i < count; i++) {
    boxes.push(boxPlotStats(values.slice(i * width, (i + 1) * width)));
  }
  return boxes;
}
