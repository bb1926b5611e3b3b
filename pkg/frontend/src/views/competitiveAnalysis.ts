/** Side-by-side look at a product and its nearest same-category rivals:
 * one stat glyph per product, a word cloud of the cohort's titles, two
 * strips of windowed sales box plots (the product versus one focused
 * competitor), and promotion lanes under each strip so a sales shift
 * can be read against what the other side was running at the time.
 */

import { boxSeries, type BoxStats } from "../layout/boxplot.js";
import { statGlyph, type GlyphValues } from "../layout/glyph.js";
import { linearScale, px } from "../scale.js";
import { el, escapeText, series, svgDoc } from "../svg.js";
import type { ProductSummary, PromotionWire, SalesDay } from "../wire.js";

export interface CompetitiveInput {
  readonly target: ProductSummary;
  readonly competitors: readonly ProductSummary[];
  /** Which competitor the lower strip follows; null leaves it empty. */
  readonly focusId: string | null;
  readonly salesByProduct: Readonly<Record<string, readonly SalesDay[]>>;
  readonly promotionsByProduct: Readonly<Record<string, readonly PromotionWire[]>>;
}

export interface CompetitiveOptions {
  readonly width: number;
  readonly height: number;
  readonly windows?: number;
  /** Competitor ids switched off in the legend. */
  readonly disabled?: ReadonlySet<string>;
}

export interface CompetitiveAnalysis {
  readonly svg: string;
  /** Box stats per strip, for tests and tooltips. */
  readonly boxes: {
    readonly target: readonly BoxStats[];
    readonly focus: readonly BoxStats[];
  };
  readonly words: readonly { word: string; count: number }[];
}

const STOP_WORDS = new Set([
  "a", "an", "and", "for", "in", "of", "on", "the", "to", "with",
]);

export function titleWords(
  products: readonly ProductSummary[],
  limit = 20,
): { word: string; count: number }[] {
  const counts = new Map<string, number>();
  for (const product of products) {
    for (const raw of product.title.toLowerCase().split(/[^a-z0-9]+/)) {
      if (raw.length < 2 || STOP_WORDS.has(raw)) continue;
      counts.set(raw, (counts.get(raw) ?? 0) + 1);
    }
  }
  return [...counts.entries()]
    .sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1))
    .slice(0, limit)
    .map(([word, count]) => ({ word, count }));
}

function cohortCeilings(products: readonly ProductSummary[]): GlyphValues {
  let median = 0;
  let std = 0;
  let iqr = 0;
  for (const p of products) {
    if (p.stats === null) continue;
    median = Math.max(median, p.stats.median);
    std = Math.max(std, p.stats.std);
    iqr = Math.max(iqr, p.stats.iqr);
  }
  return { median, std, iqr, corr_price: 1, corr_promo: 1, corr_season: 1 };
}

function scaledValues(product: ProductSummary, top: GlyphValues): GlyphValues | null {
  if (product.stats === null) return null;
  const s = product.stats;
  const over = (v: number, ceiling: number): number => (ceiling > 0 ? v / ceiling : 0);
  return {
    median: over(s.median, top.median),
    std: over(s.std, top.std),
    iqr: over(s.iqr, top.iqr),
    corr_price: s.corr_price,
    corr_promo: s.corr_promo,
    corr_season: s.corr_season,
  };
}

function boxStrip(
  boxes: readonly BoxStats[],
  x0: number,
  x1: number,
  top: number,
  bottom: number,
  className: string,
): string {
  if (boxes.length === 0) return "";
  let lo = Number.POSITIVE_INFINITY;
  let hi = Number.NEGATIVE_INFINITY;
  for (const b of boxes) {
    lo = Math.min(lo, b.min, ...b.outliers);
    hi = Math.max(hi, b.max, ...b.outliers);
  }
  if (lo === hi) hi = lo + 1;
  const y = linearScale([lo, hi], [bottom, top]);
  const slot = (x1 - x0) / boxes.length;
  const boxWidth = slot * 0.55;
  const parts: string[] = [];
  boxes.forEach((b, i) => {
    const cx = x0 + (i + 0.5) * slot;
    parts.push(
      el("line", {
        x1: px(cx), x2: px(cx), y1: px(y(b.min)), y2: px(y(b.max)),
        class: "whisker",
      }),
      el("rect", {
        x: px(cx - boxWidth / 2),
        y: px(y(b.q3)),
        width: px(boxWidth),
        height: px(Math.max(y(b.q1) - y(b.q3), 0.5)),
        class: "box",
      }),
      el("line", {
        x1: px(cx - boxWidth / 2), x2: px(cx + boxWidth / 2),
        y1: px(y(b.median)), y2: px(y(b.median)),
        class: "median",
      }),
    );
    for (const outlier of b.outliers) {
      parts.push(
        el("circle", { cx: px(cx), cy: px(y(outlier)), r: 2, class: "outlier" }),
      );
    }
  });
  return el("g", { class: className }, ...parts);
}

function promotionLanes(
  promotions: readonly PromotionWire[],
  firstDay: string,
  lastDay: string,
  x0: number,
  x1: number,
  top: number,
): string {
  const ms0 = Date.parse(`${firstDay}T00:00:00Z`);
  const ms1 = Date.parse(`${lastDay}T00:00:00Z`);
  if (!(ms1 > ms0)) return "";
  const x = linearScale([ms0, ms1], [x0, x1]);
  const lanes = promotions
    .filter((p) => p.enabled)
    .map((promo, i) =>
      el("line", {
        x1: px(Math.max(x0, x(Date.parse(`${promo.start}T00:00:00Z`)))),
        x2: px(Math.min(x1, x(Date.parse(`${promo.end}T00:00:00Z`)))),
        y1: px(top + 4 + i * 5),
        y2: px(top + 4 + i * 5),
        class: `promo-lane kind-${promo.kind}`,
      }),
    );
  return el("g", { class: "lanes" }, ...lanes);
}

export function renderCompetitiveAnalysis(
  input: CompetitiveInput,
  options: CompetitiveOptions,
): CompetitiveAnalysis {
  const { width, height } = options;
  const windows = options.windows ?? 10;
  const disabled = options.disabled ?? new Set<string>();
  const cohort = [input.target, ...input.competitors];
  const ceilings = cohortCeilings(cohort);
  const words = titleWords(cohort);

  const parts: string[] = [];

  // Glyph row along the top: target first, rivals after, equal slots.
  const glyphRadius = 26;
  const rowY = glyphRadius + 14;
  const slot = width / cohort.length;
  cohort.forEach((product, i) => {
    if (i > 0 && disabled.has(product.id)) return;
    const values = scaledValues(product, ceilings);
    if (values === null) return;
    const cx = (i + 0.5) * slot;
    const glyph = statGlyph(cx, rowY, glyphRadius, values);
    const fragments = [
      el("circle", { cx: px(cx), cy: px(rowY), r: px(glyphRadius), class: "glyph-frame" }),
      el("circle", { cx: px(cx), cy: px(rowY), r: px(glyph.zeroRadius), class: "glyph-zero" }),
      ...glyph.segments.map((seg) =>
        el("path", { d: seg.path, class: `glyph-${seg.kind}` }),
      ),
      el(
        "text",
        { x: px(cx), y: px(rowY + glyphRadius + 12), class: "glyph-label" },
        escapeText(product.id),
      ),
    ];
    if (i === 0) {
      parts.push(el("g", { class: "target-glyph" }, ...fragments));
    } else {
      parts.push(series(product.id, ...fragments));
    }
  });

  // Word cloud: simple left-to-right flow, size keyed to count.
  const cloudTop = rowY + glyphRadius + 28;
  const maxCount = words[0]?.count ?? 1;
  let cursor = 10;
  const cloud: string[] = [];
  for (const { word, count } of words) {
    const fontSize = 10 + (count / maxCount) * 14;
    cloud.push(
      el(
        "text",
        { x: px(cursor), y: px(cloudTop + 20), "font-size": px(fontSize), class: "cloud-word" },
        escapeText(word),
      ),
    );
    cursor += word.length * fontSize * 0.62 + 10;
    if (cursor > width - 60) break;
  }
  parts.push(el("g", { class: "word-cloud" }, ...cloud));

  // Two box strips with promotion lanes under each.
  const stripLeft = 36;
  const stripRight = width - 12;
  const stripTop = cloudTop + 44;
  const stripHeight = (height - stripTop - 30) / 2 - 26;

  const targetSales = input.salesByProduct[input.target.id] ?? [];
  const targetBoxes =
    targetSales.length >= windows
      ? boxSeries(targetSales.map((d) => d.units_sold), windows)
      : [];
  parts.push(
    boxStrip(targetBoxes, stripLeft, stripRight, stripTop, stripTop + stripHeight, "strip-target"),
  );
  const firstTarget = targetSales[0];
  const lastTarget = targetSales[targetSales.length - 1];
  if (firstTarget && lastTarget) {
    parts.push(
      promotionLanes(
        input.promotionsByProduct[input.target.id] ?? [],
        firstTarget.date,
        lastTarget.date,
        stripLeft,
        stripRight,
        stripTop + stripHeight,
      ),
    );
  }

  let focusBoxes: BoxStats[] = [];
  if (input.focusId !== null && !disabled.has(input.focusId)) {
    const focusSales = input.salesByProduct[input.focusId] ?? [];
    if (focusSales.length >= windows) {
      focusBoxes = boxSeries(focusSales.map((d) => d.units_sold), windows);
    }
    const focusTop = stripTop + stripHeight + 52;
    parts.push(
      boxStrip(focusBoxes, stripLeft, stripRight, focusTop, focusTop + stripHeight, "strip-focus"),
    );
    const firstFocus = focusSales[0];
    const lastFocus = focusSales[focusSales.length - 1];
    if (firstFocus && lastFocus) {
      parts.push(
        promotionLanes(
          input.promotionsByProduct[input.focusId] ?? [],
          firstFocus.date,
          lastFocus.date,
          stripLeft,
          stripRight,
          focusTop + stripHeight,
        ),
      );
    }
  }

  return {
    svg: svgDoc(width, height, ...parts),
    boxes: { target: targetBoxes, focus: focusBoxes },
    words,
  };
}
