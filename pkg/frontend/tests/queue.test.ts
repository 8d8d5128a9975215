import assert from "node:assert/strict";
import { test } from "node:test";

import {
  advance,
  applyPage,
  currentItem,
  emptyQueue,
  needsNextPage,
  queuePositionLabel,
  recordDecision,
  retreat,
} from "../src/queue.js";
import type { Label, ReviewItem, SegmentPage } from "../src/types.js";

function item(id: string, original: Label, status: ReviewItem["status"] = "unreviewed"): ReviewItem {
  return {
    segment_id: id,
    recording_id: id.split("_")[0]!,
    location: "AV",
    original_label: original,
    effective_label: status === "relabeled" ? "Unknown" : original,
    status,
    note: "",
  };
}

function page(items: ReviewItem[], total = items.length, pageNo = 0): SegmentPage {
  return { items, total, page: pageNo, page_size: 50, counts: { Present: 2, Absent: 1 } };
}

test("applyPage mirrors server items and counts", () => {
  const state = applyPage(emptyQueue(), page([item("r1_s0000", "Present"), item("r1_s0001", "Absent")]));
  assert.equal(state.total, 2);
  assert.equal(currentItem(state)?.segment_id, "r1_s0000");
  assert.deepEqual(state.counts, { Present: 2, Absent: 1 });
});

test("advance and retreat clamp at the ends", () => {
  let state = applyPage(emptyQueue(), page([item("a_s0000", "Present"), item("a_s0001", "Absent")]));
  state = retreat(state);
  assert.equal(state.position, 0);
  state = advance(state);
  assert.equal(state.position, 1);
  state = advance(state);
  assert.equal(state.position, 1);
});

test("relabel decisions bump the session tally, confirms do not touch it", () => {
  let state = applyPage(emptyQueue(), page([item("a_s0000", "Present"), item("a_s0001", "Unknown")]));
  const before = currentItem(state)!;
  state = recordDecision(state, before, { ...before, status: "relabeled", effective_label: "Unknown" });
  assert.equal(state.session.relabeled, 1);
  assert.equal(state.session.relabeledByOriginal.Present, 1);
  assert.equal(state.session.confirmed, 0);

  const second = state.items[1]!;
  state = recordDecision(state, second, { ...second, status: "confirmed" });
  assert.equal(state.session.confirmed, 1);
  assert.equal(state.session.relabeled, 1);
});

test("position label is human readable", () => {
  let state = emptyQueue();
  assert.equal(queuePositionLabel(state), "queue empty");
  state = applyPage(state, page([item("a_s0000", "Present")], 120, 1));
  assert.equal(queuePositionLabel(state), "51 / 120");
});

test("needsNextPage fires only on the last item with more pages pending", () => {
  let state = applyPage(emptyQueue(), page([item("a_s0000", "Present"), item("a_s0001", "Absent")], 4, 0));
  state = { ...state, pageSize: 2 };
  assert.equal(needsNextPage(state), false);
  state = advance(state);
  assert.equal(needsNextPage(state), true);
  const lastPage = applyPage(state, page([item("a_s0002", "Present"), item("a_s0003", "Absent")], 4, 1));
  const atEnd = advance({ ...lastPage, pageSize: 2 });
  assert.equal(needsNextPage(atEnd), false);
});
