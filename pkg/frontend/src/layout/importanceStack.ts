/** Stacked-bar layout for per-day feature-group attributions.
 *
 * Each forecast day shows one thin stacked bar: groups that pushed the
 * prediction up sit above the axis, groups that pushed it down sit
 * below. Segment heights share a fixed pixel budget in proportion to
 * absolute attribution, so the tallest bars mark the days where the
 * model had the most to say, and the split above/below shows in which
 * direction.
 */

export interface StackSegment {
  readonly group: string;
  /** Signed attribution that produced this segment. */
  readonly value: number;
  /** Pixel height, always positive. */
  readonly height: number;
  /** Top edge in SVG coordinates (y grows downward). */
  readonly y: number;
}

export interface ImportanceStack {
  readonly above: readonly StackSegment[];
  readonly below: readonly StackSegment[];
}

/**
 * Lay out one day's attributions against a horizontal axis at axisY.
 *
 * Groups with zero attribution produce no segment. When every group is
 * zero the stack is empty. Otherwise heights are
 * |phi| / sum(|phi|) * budget, groups kept in their given order:
 * positive ones stacked upward from the axis, negative ones downward.
 */
export function layoutImportanceStack(
  groups: readonly string[],
  phi: readonly number[],
  budget: number,
  axisY = 0,
): ImportanceStack {
  if (groups.length !== phi.length) {
    throw new RangeError("one attribution per group required");
  }
  if (!(budget > 0)) throw new RangeError("budget must be positive");

  let total = 0;
  for (const value of phi) total += Math.abs(value);
  if (total === 0) return { above: [], below: [] };

  const above: StackSegment[] = [];
  const below: StackSegment[] = [];
  let upEdge = axisY;
  let downEdge = axisY;
  for (let i = 0; i < groups.length; i++) {
    const value = phi[i]!;
    if (value === 0) continue;
    const height = (Math.abs(value) / total) * budget;
    if (value > 0) {
      upEdge -= height;
      above.push({ group: groups[i]!, value, height, y: upEdge });
    } else {
      below.push({ group: groups[i]!, value, height, y: downEdge });
      downEdge += height;
    }
  }
  return { above, below };
}

export function stackedHeight(stack: ImportanceStack): number {
  let total = 0;
  for (const s of stack.above) total += s.height;
  for (const s of stack.below) total += s.height;
  return total;
}
