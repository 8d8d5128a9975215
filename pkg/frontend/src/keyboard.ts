/**
 * Keyboard flow: space = play/pause, C = confirm, U = relabel to Unknown
 * (only when legal for the focused item), arrows = navigate. Illegal keys
 * are no-ops, enforced through the same action table as the buttons.
 */
import { legalActions } from "./transitions.js";
import type { ReviewItem } from "./types.js";

export type KeyCommand =
  | { kind: "play-pause" }
  | { kind: "action"; action: "confirm" | "relabel-unknown" }
  | { kind: "next" }
  | { kind: "prev" }
  | null;

export function mapKey(key: string, item: ReviewItem | null): KeyCommand {
  switch (key) {
    case " ":
      return { kind: "play-pause" };
    case "ArrowRight":
      return { kind: "next" };
    case "ArrowLeft":
      return { kind: "prev" };
    case "c":
    case "C":
      return item && legalActions(item).includes("confirm")
        ? { kind: "action", action: "confirm" }
        : null;
    case "u":
    case "U":
      return item && legalActions(item).includes("relabel-unknown")
        ? { kind: "action", action: "relabel-unknown" }
        : null;
    default:
      return null;
  }
}
