/** Types for the server's JSON responses, one interface per schema file.
 *
 * Field names stay snake_case so an object parsed from a response body is
 * already the typed value; nothing is remapped on the way in.
 */

export type ModelKind = "RandomForest" | "GradientBoosting" | "MLP";

export type PromotionKind =
  | "ValueDiscount"
  | "PercentageDiscount"
  | "FlashSale"
  | "LoyaltyPoints"
  | "FreeShipping"
  | "InterestFreeInstallment";

export const GROUP_NAMES = [
  "descriptions",
  "price",
  "temporal",
  "competitive",
  "promotion",
] as const;

export type GroupName = (typeof GROUP_NAMES)[number];

export interface ProductStats {
  median: number;
  std: number;
  iqr: number;
  corr_price: number;
  corr_promo: number;
  corr_season: number;
}

export interface ProductSummary {
  id: string;
  title: string;
  category: string;
  brand: string;
  store: string;
  base_price: number;
  /** Null when the product has too little history to score. */
  stats: ProductStats | null;
  /** 2-D embedding coordinates; null when unscored. */
  projection: [number, number] | null;
}

export interface ProductsResponse {
  products: ProductSummary[];
  projection_method: "tsne" | "pca" | null;
}

export interface ProductDetail extends ProductSummary {
  series: { first_day: string; last_day: string; n_days: number } | null;
  n_promotions: number;
}

export interface SalesDay {
  date: string;
  units_sold: number;
  price: number;
}

export interface SalesResponse {
  product_id: string;
  days: SalesDay[];
}

export interface PromotionWire {
  id: string;
  product_id: string;
  raw_text: string;
  kind: PromotionKind;
  k_d: number;
  p_t: number;
  reward: number;
  flash_hours: number;
  start: string;
  end: string;
  enabled: boolean;
}

export interface PromotionsResponse {
  product_id: string;
  promotions: PromotionWire[];
}

export interface CompetitorsResponse {
  product_id: string;
  ids: string[];
  /** True when fewer same-category products existed than were asked for. */
  short_list: boolean;
}

export interface HealthResponse {
  status: "ok";
  products: number;
  dataset_fingerprint: string;
  layout_fingerprint: string;
  kernel_backend: "cython" | "python";
  trained_models: string[];
  projection_method: "tsne" | "pca" | null;
}

export interface JobResponse {
  job_id: string;
  model_kind: ModelKind;
  status: "queued" | "running" | "done" | "error";
  error: string | null;
}

export interface ForecastWire {
  model_kind: ModelKind;
  horizon: string[];
  predictions: number[];
  baseline: number;
  groups: string[];
  /** One five-value row per horizon day; rows sum (with baseline) to the
   * day's prediction. */
  attributions: number[][];
  normalized_attributions: number[][];
}

export type EditOp = "Add" | "Delete" | "Modify" | "Toggle" | "Shift";

export interface ScenarioEdit {
  op: EditOp;
  target?: string;
  raw_text?: string;
  start?: string;
  end?: string;
  enabled?: boolean;
  new_id?: string;
}

export interface ScenarioRequest {
  product_id: string;
  horizon: { start: string; end: string };
  model_kind: ModelKind;
  edits: ScenarioEdit[];
}

export interface ScenarioComparison {
  deltas: number[];
  total_delta: number;
  /** First-day growth rate per promotion id; days where the previous value
   * is zero are skipped server-side. */
  growth_before: Record<string, number>;
  growth_after: Record<string, number>;
}

export interface WhatIfResponse {
  baseline: ForecastWire;
  scenario: ForecastWire;
  comparison: ScenarioComparison;
  promotions_after: PromotionWire[];
}

export interface ErrorBody {
  error: { status: number; kind: string; message: string };
}
