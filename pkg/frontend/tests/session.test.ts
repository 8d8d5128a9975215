import assert from "node:assert/strict";
import { test } from "node:test";

import { actionPayload, legalActions } from "../src/transitions.js";
import type { Label } from "../src/types.js";
import { FakeServer } from "./fake_server.js";

function seed(): Array<[string, Label]> {
  const labels: Label[] = ["Present", "Absent", "Unknown"];
  const rows: Array<[string, Label]> = [];
  for (let i = 0; i < 30; i++) {
    rows.push([`r${String(i).padStart(3, "0")}_s0000`, labels[i % 3]!]);
  }
  return rows;
}

test("a session driven through legalActions is never rejected", () => {
  const server = new FakeServer(seed());
  let relabels = 0;
  let confirms = 0;
  // deterministic pseudo-random session: pick among the legal actions only
  let stateHash = 7;
  for (const [id] of seed()) {
    const item = server.items.get(id)!;
    const actions = legalActions(item);
    stateHash = (stateHash * 31 + id.length + item.original_label.length) % 97;
    const action = actions[stateHash % actions.length]!;
    const result = server.post(id, actionPayload(action));
    assert.equal(result.status, 200);
    if (action === "relabel-unknown") relabels += 1;
    else confirms += 1;
  }
  assert.equal(server.rejections, 0);
  assert.equal(relabels + confirms, 30);
  assert.equal(server.exportRelabels().length, relabels);
});

test("export equals the sum of UI-performed relabels per original label", () => {
  const server = new FakeServer(seed());
  const relabeledIds: string[] = [];
  for (const [id] of seed()) {
    const item = server.items.get(id)!;
    if (legalActions(item).includes("relabel-unknown")) {
      assert.equal(server.post(id, "Unknown").status, 200);
      relabeledIds.push(id);
    } else {
      assert.equal(server.post(id, "confirm").status, 200);
    }
  }
  const exported = server.exportRelabels();
  assert.deepEqual(
    exported.map((r) => r.segment_id).sort(),
    relabeledIds.sort(),
  );
  assert.ok(exported.every((r) => r.to === "Unknown"));
});

test("bypassing the action table is what rejection looks like", () => {
  const server = new FakeServer(seed());
  const unknownItem = [...server.items.values()].find((i) => i.original_label === "Unknown")!;
  const result = server.post(unknownItem.segment_id, "Present");
  assert.equal(result.status, 409);
  assert.equal(server.exportRelabels().length, 0);
});

test("audit trail covers every accepted decision", () => {
  const server = new FakeServer(seed());
  for (const [id] of seed()) {
    const item = server.items.get(id)!;
    const action = legalActions(item)[0]!;
    server.post(id, actionPayload(action));
  }
  assert.equal(server.audit.length, 30);
});
