/** Scenario editor: the product's promotion timeline with per-campaign
 * controls, the queue of pending edits, and the outcome of the last
 * what-if run. Markup carries data-action attributes; the entry point
 * wires them up through one delegated click handler.
 */

import { validateDraft, type ScenarioDraft } from "../state.js";
import { escapeText } from "../svg.js";
import type { PromotionWire, WhatIfResponse } from "../wire.js";

export interface EditorInput {
  readonly draft: ScenarioDraft;
  readonly promotions: readonly PromotionWire[];
  readonly result: WhatIfResponse | null;
}

function button(action: string, target: string, label: string): string {
  return (
    `<button type="button" data-action="${escapeText(action)}"` +
    ` data-target="${escapeText(target)}">${escapeText(label)}</button>`
  );
}

function promotionRow(promo: PromotionWire): string {
  const state = promo.enabled ? "" : " class=\"off\"";
  return (
    `<li${state} data-promotion="${escapeText(promo.id)}">` +
    `<span class="promo-text">${escapeText(promo.raw_text)}</span>` +
    `<span class="promo-span">${promo.start} to ${promo.end}</span>` +
    button("toggle", promo.id, promo.enabled ? "Disable" : "Enable") +
    button("delete", promo.id, "Delete") +
    button("shift", promo.id, "Shift") +
    "</li>"
  );
}

function editRow(draft: ScenarioDraft, index: number): string {
  const edit = draft.edits[index]!;
  const what = [
    edit.op,
    edit.target ?? "",
    edit.raw_text ?? "",
    edit.start && edit.end ? `${edit.start} to ${edit.end}` : edit.start ?? "",
  ]
    .filter((s) => s !== "")
    .join(" ");
  return (
    `<li>${escapeText(what)}` +
    button("remove-edit", String(index), "Remove") +
    "</li>"
  );
}

function growthCell(rate: number | undefined): string {
  if (rate === undefined) return "-";
  return `${(rate * 100).toFixed(1)}%`;
}

function resultBlock(result: WhatIfResponse): string {
  const total = result.comparison.total_delta;
  const sign = total >= 0 ? "+" : "";
  const promoIds = [
    ...new Set([
      ...Object.keys(result.comparison.growth_before),
      ...Object.keys(result.comparison.growth_after),
    ]),
  ].sort();
  const rows = promoIds
    .map(
      (id) =>
        `<tr><td>${escapeText(id)}</td>` +
        `<td>${growthCell(result.comparison.growth_before[id])}</td>` +
        `<td>${growthCell(result.comparison.growth_after[id])}</td></tr>`,
    )
    .join("");
  return (
    `<div class="whatif-result">` +
    `<p>Total change over the horizon: <strong>${sign}${total.toFixed(2)} units</strong></p>` +
    (rows
      ? `<table><thead><tr><th>promotion</th><th>growth before</th>` +
        `<th>growth after</th></tr></thead><tbody>${rows}</tbody></table>`
      : "") +
    "</div>"
  );
}

export function renderStrategyEditor(input: EditorInput): string {
  const issues = validateDraft(input.draft);
  const issueList = issues.length
    ? `<ul class="issues">${issues.map((s) => `<li>${escapeText(s)}</li>`).join("")}</ul>`
    : "";
  const refreshDisabled = issues.length > 0 ? " disabled" : "";
  return (
    `<section class="strategy-editor">` +
    `<h3>Promotions for ${escapeText(input.draft.product_id)}</h3>` +
    `<ul class="timeline">${input.promotions.map(promotionRow).join("")}</ul>` +
    `<h3>Pending edits</h3>` +
    `<ul class="edits">${input.draft.edits.map((_, i) => editRow(input.draft, i)).join("")}</ul>` +
    `<form class="add-edit" data-action="add">` +
    `<input name="raw_text" placeholder="e.g. 20% Off"/>` +
    `<input name="start" type="date"/>` +
    `<input name="end" type="date"/>` +
    `<button type="submit">Add campaign</button>` +
    `</form>` +
    issueList +
    `<button type="button" data-action="refresh"${refreshDisabled}>Refresh forecast</button>` +
    (input.result ? resultBlock(input.result) : "") +
    "</section>"
  );
}
