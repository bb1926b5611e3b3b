/** Client-side view state: the current selection, the scenario the
 * user is drafting, and the bookkeeping that keeps slow responses from
 * clobbering newer ones.
 *
 * Draft validation mirrors the server's edit rules so that obviously
 * broken scenarios are caught before a request goes out; the server
 * remains the authority and will still reject anything we miss.
 */

import type { EditOp, ModelKind, ScenarioEdit, ScenarioRequest } from "./wire.js";

export const HORIZON_CAP_DAYS = 90;

export interface Horizon {
  readonly start: string;
  readonly end: string;
}

export interface DraftEdit {
  readonly op: EditOp;
  readonly target?: string;
  readonly raw_text?: string;
  readonly start?: string;
  readonly end?: string;
  readonly enabled?: boolean;
  readonly new_id?: string;
}

export interface ScenarioDraft {
  readonly product_id: string;
  readonly horizon: Horizon;
  readonly model_kind: ModelKind;
  readonly edits: readonly DraftEdit[];
}

const ISO_DATE = /^\d{4}-\d{2}-\d{2}$/;

function isIsoDate(value: string | undefined): value is string {
  return value !== undefined && ISO_DATE.test(value);
}

function horizonDays(horizon: Horizon): number {
  const ms = Date.parse(`${horizon.end}T00:00:00Z`) - Date.parse(`${horizon.start}T00:00:00Z`);
  return Math.round(ms / 86_400_000) + 1;
}

/** Problems that would make the server reject the draft, in reading order. */
export function validateDraft(draft: ScenarioDraft): string[] {
  const issues: string[] = [];
  if (draft.product_id === "") issues.push("pick a product");
  if (!isIsoDate(draft.horizon.start) || !isIsoDate(draft.horizon.end)) {
    issues.push("horizon needs ISO start and end dates");
  } else if (draft.horizon.end < draft.horizon.start) {
    issues.push(`horizon ends ${draft.horizon.end} before it starts ${draft.horizon.start}`);
  } else if (horizonDays(draft.horizon) > HORIZON_CAP_DAYS) {
    issues.push(`horizon longer than ${HORIZON_CAP_DAYS} days`);
  }

  draft.edits.forEach((edit, i) => {
    const where = `edit ${i + 1} (${edit.op})`;
    const needsTarget = edit.op !== "Add";
    if (needsTarget && !edit.target) issues.push(`${where}: needs a target promotion id`);
    switch (edit.op) {
      case "Add":
        if (!edit.raw_text) issues.push(`${where}: needs promotion text`);
        if (!isIsoDate(edit.start) || !isIsoDate(edit.end)) {
          issues.push(`${where}: needs start and end dates`);
        } else if (edit.end < edit.start) {
          issues.push(`${where}: ends ${edit.end} before it starts ${edit.start}`);
        }
        break;
      case "Modify":
        if (
          edit.raw_text === undefined &&
          edit.start === undefined &&
          edit.end === undefined &&
          edit.enabled === undefined
        ) {
          issues.push(`${where}: changes nothing`);
        }
        if (isIsoDate(edit.start) && isIsoDate(edit.end) && edit.end < edit.start) {
          issues.push(`${where}: ends ${edit.end} before it starts ${edit.start}`);
        }
        break;
      case "Shift":
        if (!isIsoDate(edit.start)) issues.push(`${where}: needs a new start date`);
        else if (isIsoDate(edit.end) && edit.end < edit.start) {
          issues.push(`${where}: ends ${edit.end} before it starts ${edit.start}`);
        }
        break;
      case "Delete":
      case "Toggle":
        break;
    }
  });
  return issues;
}

/** Wire request for a valid draft; throws when validation still fails. */
export function draftToRequest(draft: ScenarioDraft): ScenarioRequest {
  const issues = validateDraft(draft);
  if (issues.length > 0) {
    throw new Error(`scenario draft is not ready: ${issues.join("; ")}`);
  }
  const edits: ScenarioEdit[] = draft.edits.map((edit) => {
    const wire: ScenarioEdit = { op: edit.op };
    if (edit.target !== undefined) wire.target = edit.target;
    if (edit.raw_text !== undefined) wire.raw_text = edit.raw_text;
    if (edit.start !== undefined) wire.start = edit.start;
    if (edit.end !== undefined) wire.end = edit.end;
    if (edit.enabled !== undefined) wire.enabled = edit.enabled;
    if (edit.new_id !== undefined) wire.new_id = edit.new_id;
    return wire;
  });
  return {
    product_id: draft.product_id,
    horizon: { start: draft.horizon.start, end: draft.horizon.end },
    model_kind: draft.model_kind,
    edits,
  };
}

export function emptyDraft(
  productId: string,
  horizon: Horizon,
  modelKind: ModelKind,
): ScenarioDraft {
  return { product_id: productId, horizon, model_kind: modelKind, edits: [] };
}

export function withEdit(draft: ScenarioDraft, edit: DraftEdit): ScenarioDraft {
  return { ...draft, edits: [...draft.edits, edit] };
}

export function withoutEdit(draft: ScenarioDraft, index: number): ScenarioDraft {
  return { ...draft, edits: draft.edits.filter((_, i) => i !== index) };
}

/**
 * Monotone ticket counter per view. Issue a ticket before each request
 * and accept a response only if its ticket is still the newest; replies
 * that arrive after a newer request started are stale and dropped.
 */
export class RequestSequencer {
  private readonly latest = new Map<string, number>();

  issue(view: string): number {
    const next = (this.latest.get(view) ?? 0) + 1;
    this.latest.set(view, next);
    return next;
  }

  accept(view: string, ticket: number): boolean {
    return this.latest.get(view) === ticket;
  }
}
