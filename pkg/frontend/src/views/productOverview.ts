/** Catalog scatter: every scored product at its 2-D embedding position,
 * drawn as a six-segment stat glyph and coloured by category. Nearby
 * glyphs are products that sell alike, so clusters are worth reading.
 */

import { statGlyph, type GlyphValues } from "../layout/glyph.js";
import { extent, linearScale, px } from "../scale.js";
import { el, escapeText, series, svgDoc } from "../svg.js";
import type { ProductsResponse, ProductSummary } from "../wire.js";

export interface OverviewOptions {
  readonly width: number;
  readonly height: number;
  readonly glyphRadius?: number;
  /** Categories switched off in the legend. */
  readonly disabled?: ReadonlySet<string>;
  /** Substring filter over id, title and brand; empty shows all. */
  readonly query?: string;
  readonly selectedId?: string | null;
}

export interface PlacedProduct {
  readonly id: string;
  readonly x: number;
  readonly y: number;
  readonly category: string;
}

export interface ProductOverview {
  readonly svg: string;
  /** Screen positions for hit testing, in draw order. */
  readonly placed: readonly PlacedProduct[];
  /** Every category present in the response, sorted, for the legend. */
  readonly categories: readonly string[];
}

function matchesQuery(product: ProductSummary, query: string): boolean {
  if (query === "") return true;
  const needle = query.toLowerCase();
  return (
    product.id.toLowerCase().includes(needle) ||
    product.title.toLowerCase().includes(needle) ||
    product.brand.toLowerCase().includes(needle)
  );
}

/** Per-dimension maxima so magnitude segments are comparable across the
 * whole catalog, not just the products currently visible. */
function magnitudeCeilings(products: readonly ProductSummary[]): GlyphValues {
  let median = 0;
  let std = 0;
  let iqr = 0;
  for (const p of products) {
    if (p.stats === null) continue;
    if (p.stats.median > median) median = p.stats.median;
    if (p.stats.std > std) std = p.stats.std;
    if (p.stats.iqr > iqr) iqr = p.stats.iqr;
  }
  return { median, std, iqr, corr_price: 1, corr_promo: 1, corr_season: 1 };
}

function glyphValues(product: ProductSummary, ceilings: GlyphValues): GlyphValues {
  const stats = product.stats!;
  const over = (value: number, ceiling: number): number =>
    ceiling > 0 ? value / ceiling : 0;
  return {
    median: over(stats.median, ceilings.median),
    std: over(stats.std, ceilings.std),
    iqr: over(stats.iqr, ceilings.iqr),
    corr_price: stats.corr_price,
    corr_promo: stats.corr_promo,
    corr_season: stats.corr_season,
  };
}

export function renderProductOverview(
  data: ProductsResponse,
  options: OverviewOptions,
): ProductOverview {
  const { width, height } = options;
  const radius = options.glyphRadius ?? 14;
  const disabled = options.disabled ?? new Set<string>();
  const query = options.query ?? "";
  const margin = radius + 8;

  const categories = [...new Set(data.products.map((p) => p.category))].sort();
  const categoryIndex = new Map(categories.map((c, i) => [c, i]));

  const scored = data.products.filter((p) => p.projection !== null && p.stats !== null);
  const ceilings = magnitudeCeilings(data.products);

  let xScale = (v: number): number => width / 2;
  let yScale = (v: number): number => height / 2;
  if (scored.length > 1) {
    const [x0, x1] = extent(scored.map((p) => p.projection![0]));
    const [y0, y1] = extent(scored.map((p) => p.projection![1]));
    xScale = linearScale([x0, x1], [margin, width - margin]);
    yScale = linearScale([y0, y1], [height - margin, margin]);
  }

  const placed: PlacedProduct[] = [];
  const byCategory = new Map<string, string[]>();
  for (const product of scored) {
    if (disabled.has(product.category)) continue;
    if (!matchesQuery(product, query)) continue;
    const x = xScale(product.projection![0]);
    const y = yScale(product.projection![1]);
    placed.push({ id: product.id, x, y, category: product.category });

    const glyph = statGlyph(x, y, radius, glyphValues(product, ceilings));
    const classIndex = categoryIndex.get(product.category)!;
    const parts: string[] = [
      el("circle", {
        cx: px(x),
        cy: px(y),
        r: px(radius),
        class: "glyph-frame",
      }),
      el("circle", {
        cx: px(x),
        cy: px(y),
        r: px(glyph.zeroRadius),
        class: "glyph-zero",
      }),
    ];
    for (const segment of glyph.segments) {
      parts.push(
        el("path", {
          d: segment.path,
          class: `glyph-${segment.kind} cat-${classIndex}`,
        }),
      );
    }
    if (product.id === options.selectedId) {
      parts.push(
        el("circle", {
          cx: px(x),
          cy: px(y),
          r: px(radius + 4),
          class: "glyph-selected",
        }),
      );
    }
    const bucket = byCategory.get(product.category) ?? [];
    bucket.push(
      el(
        "g",
        { "data-product": product.id },
        el("title", {}, escapeText(`${product.id} ${product.title}`)),
        ...parts,
      ),
    );
    byCategory.set(product.category, bucket);
  }

  const groups = categories
    .filter((c) => byCategory.has(c))
    .map((c) => series(c, ...byCategory.get(c)!));
  return { svg: svgDoc(width, height, ...groups), placed, categories };
}
