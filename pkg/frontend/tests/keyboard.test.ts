import assert from "node:assert/strict";
import { test } from "node:test";

import { mapKey } from "../src/keyboard.js";
import type { Label, ReviewItem } from "../src/types.js";

function item(original: Label): ReviewItem {
  return {
    segment_id: "r1_s0000",
    recording_id: "r1",
    location: "AV",
    original_label: original,
    effective_label: original,
    status: "unreviewed",
    note: "",
  };
}

test("space toggles playback regardless of item", () => {
  assert.deepEqual(mapKey(" ", item("Unknown")), { kind: "play-pause" });
  assert.deepEqual(mapKey(" ", null), { kind: "play-pause" });
});

test("U on an Unknown item is a no-op", () => {
  assert.equal(mapKey("u", item("Unknown")), null);
  assert.equal(mapKey("U", item("Unknown")), null);
});

test("U relabels when the item permits it", () => {
  assert.deepEqual(mapKey("u", item("Present")), { kind: "action", action: "relabel-unknown" });
  assert.deepEqual(mapKey("U", item("Absent")), { kind: "action", action: "relabel-unknown" });
});

test("C confirms any reviewable item", () => {
  assert.deepEqual(mapKey("c", item("Unknown")), { kind: "action", action: "confirm" });
  assert.deepEqual(mapKey("C", item("Present")), { kind: "action", action: "confirm" });
});

test("arrows navigate", () => {
  assert.deepEqual(mapKey("ArrowRight", null), { kind: "next" });
  assert.deepEqual(mapKey("ArrowLeft", null), { kind: "prev" });
});

test("unbound keys are ignored", () => {
  assert.equal(mapKey("x", item("Present")), null);
  assert.equal(mapKey("Enter", item("Present")), null);
});
