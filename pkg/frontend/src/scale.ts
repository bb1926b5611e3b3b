/** Linear scales and SVG path builders shared by the chart views.
 *
 * Path strings are built with a fixed two-decimal format so that equal
 * inputs always produce byte-equal output. The what-if view leans on
 * this: a scenario with no edits must redraw the exact same step path
 * as the baseline, and we check that by comparing strings.
 */

export interface Scale {
  (value: number): number;
  readonly domain: readonly [number, number];
  readonly range: readonly [number, number];
}

export function linearScale(
  domain: readonly [number, number],
  range: readonly [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const slope = span === 0 ? 0 : (r1 - r0) / span;
  const scale = (value: number): number => r0 + (value - d0) * slope;
  scale.domain = domain;
  scale.range = range;
  return scale as Scale;
}

/** Two decimals, no trailing zeros, "-0" collapsed to "0". */
export function px(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return (Object.is(rounded, -0) ? 0 : rounded).toString();
}

export function linePath(xs: readonly number[], ys: readonly number[]): string {
  if (xs.length !== ys.length) throw new RangeError("x/y length mismatch");
  if (xs.length === 0) return "";
  const parts = [`M${px(xs[0]!)},${px(ys[0]!)}`];
  for (let i = 1; i < xs.length; i++) {
    parts.push(`L${px(xs[i]!)},${px(ys[i]!)}`);
  }
  return parts.join("");
}

/** Step-after path: hold each value until the next sample. */
export function stepPath(xs: readonly number[], ys: readonly number[]): string {
  if (xs.length !== ys.length) throw new RangeError("x/y length mismatch");
  if (xs.length === 0) return "";
  const parts = [`M${px(xs[0]!)},${px(ys[0]!)}`];
  for (let i = 1; i < xs.length; i++) {
    parts.push(`H${px(xs[i]!)}V${px(ys[i]!)}`);
  }
  return parts.join("");
}

export function extent(values: readonly number[]): [number, number] {
  if (values.length === 0) throw new RangeError("extent of an empty list");
  let lo = values[0]!;
  let hi = values[0]!;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}
