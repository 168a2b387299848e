/**
 * Merge-control eligibility. The control only appears when the selection
 * could actually be merged: at least two units, all unlabeled, all from
 * one document, and adjacent in that document's unit order. This mirrors
 * the server's preconditions so the button never offers a doomed request.
 */

import type { UnitSummary } from "./types.js";

export interface MergeCheck {
  eligible: boolean;
  reason: string | null;
}

export function canMerge(allUnits: UnitSummary[], selectedIds: string[]): MergeCheck {
  if (selectedIds.length < 2) {
    return { eligible: false, reason: "select at least two units" };
  }
  const byId = new Map(allUnits.map((u) => [u.id, u]));
  const selected: UnitSummary[] = [];
  for (const id of selectedIds) {
    const unit = byId.get(id);
    if (!unit) return { eligible: false, reason: `unknown unit ${id}` };
    selected.push(unit);
  }
  if (selected.some((u) => u.record !== null)) {
    return { eligible: false, reason: "only unlabeled units can be merged" };
  }
  const docIds = new Set(selected.map((u) => u.document_id));
  if (docIds.size > 1) {
    return { eligible: false, reason: "units span documents" };
  }
  const docUnits = allUnits.filter((u) => u.document_id === selected[0]!.document_id);
  const positions = selected
    .map((u) => docUnits.findIndex((d) => d.id === u.id))
    .sort((a, b) => a - b);
  for (let i = 1; i < positions.length; i += 1) {
    if (positions[i]! !== positions[i - 1]! + 1) {
      return { eligible: false, reason: "units are not adjacent" };
    }
  }
  return { eligible: true, reason: null };
}
