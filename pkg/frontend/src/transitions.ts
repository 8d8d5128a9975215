/**
 * The one-way re-label rule, mirrored from the server: a segment may move to
 * Unknown only from Present or Absent, and nothing else ever changes label.
 * Deriving the button set from this table is what guarantees the UI can
 * never submit a request the server would reject.
 */
import type { Action, Label, ReviewItem } from "./types.js";

export function isLegalTransition(from: Label, to: Label): boolean {
  return to === "Unknown" && (from === "Present" || from === "Absent");
}

/** Actions offered for an item; Unknown originals get confirm only. */
export function legalActions(item: ReviewItem): Action[] {
  if (item.status === "relabeled") {
    return []; // decision already recorded; nothing further is legal
  }
  const actions: Action[] = ["confirm"];
  if (isLegalTransition(item.original_label, "Unknown")) {
    actions.push("relabel-unknown");
  }
  return actions;
}

/** Request body value for one action. */
export function actionPayload(action: Action): string {
  return action === "confirm" ? "confirm" : "Unknown";
}
