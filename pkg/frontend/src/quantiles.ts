/** Quantiles under the linear-interpolation rule the backend uses for
 * product stats, so box plots drawn here agree with stats served there.
 */

export function quantileSorted(sorted: readonly number[], q: number): number {
  if (sorted.length === 0) throw new RangeError("quantile of an empty list");
  if (q < 0 || q > 1) throw new RangeError(`q must be in [0, 1], got ${q}`);
  const position = q * (sorted.length - 1);
  const lower = Math.floor(position);
  const fraction = position - lower;
  const a = sorted[lower]!;
  if (fraction === 0) return a;
  return a + fraction * (sorted[lower + 1]! - a);
}

export function quantile(values: readonly number[], q: number): number {
  return quantileSorted([...values].sort((x, y) => x - y), q);
}
