/**
 * Pure review-queue state. The server stays the source of truth: after every
 * accepted mutation the caller refetches the page and folds it back in here;
 * only the session tallies live purely on the client.
 */
import type { Label, ReviewItem, ReviewStatus, SegmentPage } from "./types.js";

export interface SessionTally {
  confirmed: number;
  relabeled: number;
  relabeledByOriginal: Partial<Record<Label, number>>;
}

export interface QueueState {
  items: ReviewItem[];
  position: number;
  total: number;
  page: number;
  pageSize: number;
  filter: ReviewStatus | null;
  counts: Partial<Record<Label, number>>;
  session: SessionTally;
}

export function emptyQueue(filter: ReviewStatus | null = "unreviewed", pageSize = 50): QueueState {
  return {
    items: [],
    position: 0,
    total: 0,
    page: 0,
    pageSize,
    filter,
    counts: {},
    session: { confirmed: 0, relabeled: 0, relabeledByOriginal: {} },
  };
}

export function currentItem(state: QueueState): ReviewItem | null {
  return state.items[state.position] ?? null;
}

export function queuePositionLabel(state: QueueState): string {
  if (state.total === 0) return "queue empty";
  const absolute = state.page * state.pageSize + state.position + 1;
  return `${absolute} / ${state.total}`;
}

/** Fold a freshly fetched page into the state (source-of-truth refresh). */
export function applyPage(state: QueueState, page: SegmentPage): QueueState {
  const position = Math.min(state.position, Math.max(page.items.length - 1, 0));
  return { ...state, items: page.items, total: page.total, page: page.page, counts: page.counts, position };
}

/** Record an accepted decision in the session tallies. */
export function recordDecision(state: QueueState, before: ReviewItem, after: ReviewItem): QueueState {
  const session = {
    ...state.session,
    relabeledByOriginal: { ...state.session.relabeledByOriginal },
  };
  if (after.status === "relabeled" && before.status !== "relabeled") {
    session.relabeled += 1;
    session.relabeledByOriginal[before.original_label] =
      (session.relabeledByOriginal[before.original_label] ?? 0) + 1;
  } else if (after.status === "confirmed") {
    session.confirmed += 1;
  }
  return { ...state, session };
}

export function advance(state: QueueState): QueueState {
  if (state.position + 1 < state.items.length) {
    return { ...state, position: state.position + 1 };
  }
  return state;
}

export function retreat(state: QueueState): QueueState {
  return state.position > 0 ? { ...state, position: state.position - 1 } : state;
}

/** True when the cursor sits on the last item of the page and more pages exist. */
export function needsNextPage(state: QueueState): boolean {
  const consumed = state.page * state.pageSize + state.items.length;
  return state.position >= state.items.length - 1 && consumed < state.total;
}
