/** Browser entry point. Everything above this file is pure data-to-
 * markup; this is the one module that owns the DOM, the API client and
 * the event wiring.
 */

import { ApiClient, ApiError } from "./api.js";
import { RequestSequencer, draftToRequest, emptyDraft, validateDraft, withEdit, withoutEdit, type ScenarioDraft } from "./state.js";
import { renderCompetitiveAnalysis } from "./views/competitiveAnalysis.js";
import { renderProductOverview } from "./views/productOverview.js";
import { KIND_ORDER, renderPromotionCalendar } from "./views/promotionCalendar.js";
import { renderSalesPrediction } from "./views/salesPrediction.js";
import { renderStrategyEditor } from "./views/strategyEditor.js";
import type {
  ForecastWire,
  ModelKind,
  ProductsResponse,
  PromotionKind,
  PromotionWire,
  SalesDay,
  WhatIfResponse,
} from "./wire.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");
const sequencer = new RequestSequencer();

interface AppState {
  products: ProductsResponse;
  selectedId: string | null;
  modelKind: ModelKind;
  sales: SalesDay[];
  promotions: PromotionWire[];
  competitorIds: string[];
  focusId: string | null;
  forecast: ForecastWire | null;
  whatIf: WhatIfResponse | null;
  draft: ScenarioDraft | null;
  disabledByView: Map<string, Set<string>>;
  status: string;
}

const state: AppState = {
  products: { products: [], projection_method: null },
  selectedId: null,
  modelKind: "RandomForest",
  sales: [],
  promotions: [],
  competitorIds: [],
  focusId: null,
  forecast: null,
  whatIf: null,
  draft: null,
  disabledByView: new Map(),
  status: "loading catalog",
};

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function disabledFor(view: string): Set<string> {
  let set = state.disabledByView.get(view);
  if (!set) {
    set = new Set();
    state.disabledByView.set(view, set);
  }
  return set;
}

function setStatus(text: string): void {
  state.status = text;
  byId("status").textContent = text;
}

function fail(err: unknown): void {
  if (err instanceof ApiError) setStatus(`${err.kind}: ${err.message}`);
  else setStatus(String(err));
}

function legend(view: string, names: readonly string[]): string {
  const disabled = disabledFor(view);
  return names
    .map((name) => {
      const off = disabled.has(name) ? " off" : "";
      return (
        `<button type="button" class="legend-item${off}"` +
        ` data-legend-view="${view}" data-legend-name="${name}">${name}</button>`
      );
    })
    .join("");
}

function defaultHorizon(): { start: string; end: string } {
  const last = state.sales[state.sales.length - 1];
  const base = last ? Date.parse(`${last.date}T00:00:00Z`) : Date.now();
  const start = new Date(base + 86_400_000).toISOString().slice(0, 10);
  const end = new Date(base + 14 * 86_400_000).toISOString().slice(0, 10);
  return { start, end };
}

function renderAll(): void {
  const overview = renderProductOverview(state.products, {
    width: 760,
    height: 560,
    disabled: disabledFor("overview"),
    query: (byId("search") as HTMLInputElement).value,
    selectedId: state.selectedId,
  });
  byId("view-overview").innerHTML = overview.svg;
  byId("legend-overview").innerHTML = legend("overview", overview.categories);

  if (state.selectedId !== null) {
    const year = state.sales.length
      ? Number(state.sales[state.sales.length - 1]!.date.slice(0, 4))
      : new Date().getFullYear();
    const calendar = renderPromotionCalendar(state.promotions, state.sales, {
      size: 560,
      currentYear: year,
      disabled: disabledFor("calendar") as Set<PromotionKind>,
    });
    byId("view-calendar").innerHTML = calendar.svg;
    byId("legend-calendar").innerHTML = legend("calendar", KIND_ORDER);

    const shown = state.whatIf?.scenario ?? state.forecast;
    const prediction = renderSalesPrediction(state.sales, shown, state.promotions, {
      width: 920,
      height: 420,
      disabled: disabledFor("prediction"),
    });
    byId("view-prediction").innerHTML = prediction.svg;
    byId("legend-prediction").innerHTML = legend("prediction", prediction.seriesNames);

    if (state.draft) {
      byId("view-strategy").innerHTML = renderStrategyEditor({
        draft: state.draft,
        promotions: state.promotions,
        result: state.whatIf,
      });
    }

    const target = state.products.products.find((p) => p.id === state.selectedId);
    if (target) {
      const competitors = state.competitorIds
        .map((id) => state.products.products.find((p) => p.id === id))
        .filter((p): p is NonNullable<typeof p> => p !== undefined);
      const analysis = renderCompetitiveAnalysis(
        {
          target,
          competitors,
          focusId: state.focusId,
          salesByProduct: { [target.id]: state.sales },
          promotionsByProduct: { [target.id]: state.promotions },
        },
        { width: 920, height: 520, disabled: disabledFor("competitive") },
      );
      byId("view-competitive").innerHTML = analysis.svg;
      byId("legend-competitive").innerHTML = legend("competitive", state.competitorIds);
    }
  }
}

async function selectProduct(id: string): Promise<void> {
  const ticket = sequencer.issue("product");
  setStatus(`loading ${id}`);
  try {
    const [sales, promos, competitors] = await Promise.all([
      api.sales(id),
      api.promotions(id),
      api.competitors(id, 5),
    ]);
    if (!sequencer.accept("product", ticket)) return;
    state.selectedId = id;
    state.sales = sales.days;
    state.promotions = promos.promotions;
    state.competitorIds = competitors.ids;
    state.focusId = competitors.ids[0] ?? null;
    state.forecast = null;
    state.whatIf = null;
    state.draft = emptyDraft(id, defaultHorizon(), state.modelKind);
    setStatus(`${id}: ${sales.days.length} days, ${promos.promotions.length} promotions`);
    renderAll();
  } catch (err) {
    fail(err);
  }
}

async function refreshForecast(): Promise<void> {
  if (!state.draft) return;
  const issues = validateDraft(state.draft);
  if (issues.length > 0) {
    setStatus(issues[0]!);
    return;
  }
  const ticket = sequencer.issue("whatif");
  setStatus("running scenario");
  try {
    const response = await api.whatIf(draftToRequest(state.draft));
    if (!sequencer.accept("whatif", ticket)) return;
    state.whatIf = response;
    state.forecast = response.baseline;
    setStatus(`scenario total change ${response.comparison.total_delta.toFixed(2)} units`);
    renderAll();
  } catch (err) {
    fail(err);
  }
}

async function trainAndPredict(): Promise<void> {
  if (!state.draft) return;
  const ticket = sequencer.issue("forecast");
  try {
    setStatus(`training ${state.modelKind}`);
    const job = await api.train(state.modelKind);
    await api.waitForJob(job.job_id);
    setStatus("forecasting");
    const forecast = await api.predict(
      state.draft.product_id,
      state.draft.horizon.start,
      state.draft.horizon.end,
      state.modelKind,
    );
    if (!sequencer.accept("forecast", ticket)) return;
    state.forecast = forecast;
    state.whatIf = null;
    setStatus("forecast ready");
    renderAll();
  } catch (err) {
    fail(err);
  }
}

function onEditorClick(event: Event): void {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!target || !state.draft) return;
  const action = target.getAttribute("data-action")!;
  const ref = target.getAttribute("data-target") ?? "";
  if (action === "toggle") state.draft = withEdit(state.draft, { op: "Toggle", target: ref });
  else if (action === "delete") state.draft = withEdit(state.draft, { op: "Delete", target: ref });
  else if (action === "shift") {
    const start = window.prompt("New start date (YYYY-MM-DD)?");
    if (!start) return;
    state.draft = withEdit(state.draft, { op: "Shift", target: ref, start });
  } else if (action === "remove-edit") state.draft = withoutEdit(state.draft, Number(ref));
  else if (action === "refresh") {
    void refreshForecast();
    return;
  }
  renderAll();
}

function onEditorSubmit(event: Event): void {
  event.preventDefault();
  if (!state.draft) return;
  const form = event.target as HTMLFormElement;
  const value = (name: string): string =>
    (form.elements.namedItem(name) as HTMLInputElement).value;
  state.draft = withEdit(state.draft, {
    op: "Add",
    raw_text: value("raw_text"),
    start: value("start"),
    end: value("end"),
  });
  renderAll();
}

function onLegendClick(event: Event): void {
  const target = (event.target as HTMLElement).closest("[data-legend-view]");
  if (!target) return;
  const view = target.getAttribute("data-legend-view")!;
  const name = target.getAttribute("data-legend-name")!;
  const disabled = disabledFor(view);
  if (disabled.has(name)) disabled.delete(name);
  else disabled.add(name);
  renderAll();
}

function onOverviewClick(event: Event): void {
  const target = (event.target as Element).closest("[data-product]");
  if (!target) return;
  void selectProduct(target.getAttribute("data-product")!);
}

async function start(): Promise<void> {
  try {
    const health = await api.health();
    setStatus(
      `${health.products} products, backend ${health.kernel_backend}, ` +
        `models: ${health.trained_models.join(", ") || "none"}`,
    );
    state.products = await api.products();
    renderAll();
  } catch (err) {
    fail(err);
  }
}

byId("view-overview").addEventListener("click", onOverviewClick);
byId("view-strategy").addEventListener("click", onEditorClick);
byId("view-strategy").addEventListener("submit", onEditorSubmit);
document.body.addEventListener("click", onLegendClick);
byId("search").addEventListener("input", renderAll);
byId("train").addEventListener("click", () => void trainAndPredict());
(byId("model-kind") as HTMLSelectElement).addEventListener("change", (event) => {
  state.modelKind = (event.target as HTMLSelectElement).value as ModelKind;
  if (state.draft) state.draft = { ...state.draft, model_kind: state.modelKind };
});

void start();
