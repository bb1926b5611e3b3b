/** Six-segment product glyph for the scatter and competitor views.
 *
 * A glyph summarises one product's sales character in a ring of six
 * 60-degree sectors, always in the same order so products can be
 * compared at a glance. The three magnitude dimensions (median, spread,
 * interquartile range) draw as pie-shaped bars growing out from the
 * centre. The three correlations (price, promotion, season) draw as
 * ring-shaped bars anchored on a zero circle: outward means positive,
 * inward means negative, so direction is visible before size.
 */

import { annularSectorPath } from "./radial.js";

export const GLYPH_DIMS = [
  "median",
  "std",
  "iqr",
  "corr_price",
  "corr_promo",
  "corr_season",
] as const;

export type GlyphDim = (typeof GLYPH_DIMS)[number];

/** Magnitudes normalised to [0, 1] by the caller; correlations in [-1, 1]. */
export type GlyphValues = Readonly<Record<GlyphDim, number>>;

export interface GlyphSegment {
  readonly dim: GlyphDim;
  readonly kind: "magnitude" | "correlation";
  readonly value: number;
  readonly path: string;
}

export interface Glyph {
  readonly segments: readonly GlyphSegment[];
  /** Radius of the correlation zero line, for the reference arc. */
  readonly zeroRadius: number;
}

const SECTOR = Math.PI / 3;
const GAP = 0.05; // radians shaved off each sector edge
const ZERO_FRACTION = 0.6; // zero circle sits at this share of the radius
const INNER_FLOOR = 0.25; // most negative correlations stop here

function clampUnit(value: number, lo: number): number {
  if (!Number.isFinite(value)) throw new RangeError("glyph values must be finite");
  return Math.min(1, Math.max(lo, value));
}

export function statGlyph(
  cx: number,
  cy: number,
  radius: number,
  values: GlyphValues,
): Glyph {
  if (!(radius > 0)) throw new RangeError("glyph radius must be positive");
  const zeroRadius = ZERO_FRACTION * radius;
  const innerFloor = INNER_FLOOR * radius;
  const segments: GlyphSegment[] = [];

  GLYPH_DIMS.forEach((dim, i) => {
    const a0 = i * SECTOR + GAP;
    const a1 = (i + 1) * SECTOR - GAP;
    if (i < 3) {
      const value = clampUnit(values[dim], 0);
      if (value === 0) return;
      segments.push({
        dim,
        kind: "magnitude",
        value,
        path: annularSectorPath(cx, cy, 0, value * radius, a0, a1),
      });
    } else {
      const value = clampUnit(values[dim], -1);
      if (value === 0) return;
      const r1 = value > 0 ? zeroRadius + value * (radius - zeroRadius) : zeroRadius;
      const r0 = value > 0 ? zeroRadius : zeroRadius + value * (zeroRadius - innerFloor);
      segments.push({
        dim,
        kind: "correlation",
        value,
        path: annularSectorPath(cx, cy, r0, r1, a0, a1),
      });
    }
  });

  return { segments, zeroRadius };
}
