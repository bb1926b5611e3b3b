/** Forecast view: observed sales as a dashed line, price as a thin
 * second line, the model's horizon as a step line, and under the chart
 * one stacked importance bar per forecast day plus dotted lanes marking
 * promotion spans.
 *
 * The step path is returned as data, not just markup. A what-if run
 * with no edits must reproduce the baseline forecast exactly, and the
 * cheapest honest check is that both renders emit the same path string.
 */

import { layoutImportanceStack } from "../layout/importanceStack.js";
import { extent, linearScale, linePath, px, stepPath } from "../scale.js";
import { el, series, svgDoc } from "../svg.js";
import type { ForecastWire, PromotionWire, SalesDay } from "../wire.js";

export interface PredictionOptions {
  readonly width: number;
  readonly height: number;
  /** Series names switched off in the legend. */
  readonly disabled?: ReadonlySet<string>;
}

export interface SalesPrediction {
  readonly svg: string;
  readonly paths: {
    readonly actual: string;
    readonly price: string;
    readonly prediction: string;
  };
  /** Series names available for the legend, in draw order. */
  readonly seriesNames: readonly string[];
}

const MS_PER_DAY = 86_400_000;
const STRIP_HEIGHT = 90;
const LANE_HEIGHT = 8;

function dayNumber(iso: string): number {
  return Date.parse(`${iso}T00:00:00Z`) / MS_PER_DAY;
}

export function renderSalesPrediction(
  sales: readonly SalesDay[],
  forecast: ForecastWire | null,
  promotions: readonly PromotionWire[],
  options: PredictionOptions,
): SalesPrediction {
  const { width, height } = options;
  const disabled = options.disabled ?? new Set<string>();
  const margin = { left: 42, right: 42, top: 12, bottom: 16 };
  const laneBand = promotions.length * LANE_HEIGHT;
  const chartBottom = height - margin.bottom - STRIP_HEIGHT - laneBand;
  const chartTop = margin.top;

  const horizon = forecast?.horizon ?? [];
  const allDayNumbers = [
    ...sales.map((d) => dayNumber(d.date)),
    ...horizon.map(dayNumber),
  ];
  if (allDayNumbers.length === 0) {
    return {
      svg: svgDoc(width, height),
      paths: { actual: "", price: "", prediction: "" },
      seriesNames: [],
    };
  }
  const x = linearScale(extent(allDayNumbers), [margin.left, width - margin.right]);

  const units = [
    ...sales.map((d) => d.units_sold),
    ...(forecast?.predictions ?? []),
  ];
  const y = linearScale([0, Math.max(...units, 1)], [chartBottom, chartTop]);

  const parts: string[] = [];
  const seriesNames: string[] = [];
  const axis = el("line", {
    x1: px(margin.left), y1: px(chartBottom),
    x2: px(width - margin.right), y2: px(chartBottom),
    class: "axis",
  });
  parts.push(axis);

  const actual = linePath(
    sales.map((d) => x(dayNumber(d.date))),
    sales.map((d) => y(d.units_sold)),
  );
  if (sales.length > 0) {
    seriesNames.push("actual");
    if (!disabled.has("actual")) {
      parts.push(series("actual", el("path", { d: actual, class: "line-actual" })));
    }
  }

  let price = "";
  if (sales.length > 0) {
    const [p0, p1] = extent(sales.map((d) => d.price));
    const yPrice = linearScale([p0, p1 === p0 ? p0 + 1 : p1], [chartBottom, chartTop]);
    price = linePath(
      sales.map((d) => x(dayNumber(d.date))),
      sales.map((d) => yPrice(d.price)),
    );
    seriesNames.push("price");
    if (!disabled.has("price")) {
      parts.push(series("price", el("path", { d: price, class: "line-price" })));
    }
  }

  let prediction = "";
  if (forecast !== null && horizon.length > 0) {
    prediction = stepPath(
      horizon.map((d) => x(dayNumber(d))),
      forecast.predictions.map((v) => y(v)),
    );
    seriesNames.push("prediction");
    if (!disabled.has("prediction")) {
      parts.push(
        series("prediction", el("path", { d: prediction, class: "line-prediction" })),
      );
    }

    const stripAxis = height - margin.bottom - STRIP_HEIGHT / 2;
    const slotWidth = horizon.length > 1
      ? (x(dayNumber(horizon[1]!)) - x(dayNumber(horizon[0]!)))
      : 12;
    const barWidth = Math.max(2, Math.min(10, slotWidth * 0.6));
    const bars: string[] = [];
    forecast.attributions.forEach((row, i) => {
      const stack = layoutImportanceStack(forecast.groups, row, STRIP_HEIGHT - 10, stripAxis);
      const cx = x(dayNumber(horizon[i]!));
      for (const seg of [...stack.above, ...stack.below]) {
        bars.push(
          el("rect", {
            x: px(cx - barWidth / 2),
            y: px(seg.y),
            width: px(barWidth),
            height: px(seg.height),
            class: `group-${seg.group}${seg.value < 0 ? " negative" : ""}`,
          }),
        );
      }
    });
    bars.push(
      el("line", {
        x1: px(margin.left), y1: px(stripAxis),
        x2: px(width - margin.right), y2: px(stripAxis),
        class: "axis",
      }),
    );
    seriesNames.push("importance");
    if (!disabled.has("importance")) parts.push(series("importance", ...bars));
  }

  if (promotions.length > 0) {
    const laneTop = chartBottom + 6;
    const lanes = promotions.map((promo, i) => {
      const yLane = laneTop + i * LANE_HEIGHT;
      return el("line", {
        x1: px(x(dayNumber(promo.start))),
        x2: px(x(dayNumber(promo.end))),
        y1: px(yLane),
        y2: px(yLane),
        class: `promo-lane kind-${promo.kind}${promo.enabled ? "" : " off"}`,
      });
    });
    seriesNames.push("promotions");
    if (!disabled.has("promotions")) parts.push(series("promotions", ...lanes));
  }

  return { svg: svgDoc(width, height, ...parts), paths: { actual, price, prediction }, seriesNames };
}
