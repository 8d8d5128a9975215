/**
 * In-memory stand-in for the review service, enforcing the same one-way
 * transition rule; used to prove the UI never produces a rejectable request.
 */
import type { Label, ReviewItem } from "../src/types.js";

export class FakeServer {
  readonly items = new Map<string, ReviewItem>();
  readonly audit: Array<{ segment_id: string; from: Label; to: Label; action: string }> = [];
  rejections = 0;

  constructor(seed: Array<[string, Label]>) {
    for (const [id, label] of seed) {
      this.items.set(id, {
        segment_id: id,
        recording_id: id.split("_")[0]!,
        location: "AV",
        original_label: label,
        effective_label: label,
        status: "unreviewed",
        note: "",
      });
    }
  }

  post(segmentId: string, to: string): { status: number; item?: ReviewItem; error?: string } {
    const item = this.items.get(segmentId);
    if (!item) return { status: 404, error: "unknown segment" };
    if (to === "confirm") {
      if (item.status === "relabeled") {
        this.rejections += 1;
        return { status: 409, error: "segment already re-labeled" };
      }
      const updated: ReviewItem = { ...item, status: "confirmed" };
      this.items.set(segmentId, updated);
      this.audit.push({ segment_id: segmentId, from: item.effective_label, to: item.effective_label, action: "confirm" });
      return { status: 200, item: updated };
    }
    const legal = to === "Unknown" && (item.original_label === "Present" || item.original_label === "Absent");
    if (!legal) {
      this.rejections += 1;
      return { status: 409, error: `illegal transition ${item.original_label} -> ${to}` };
    }
    const updated: ReviewItem = { ...item, effective_label: "Unknown", status: "relabeled" };
    this.items.set(segmentId, updated);
    this.audit.push({ segment_id: segmentId, from: item.original_label, to: "Unknown", action: "relabel" });
    return { status: 200, item: updated };
  }

  exportRelabels(): Array<{ segment_id: string; from: Label; to: Label }> {
    return [...this.items.values()]
      .filter((i) => i.status === "relabeled")
      .map((i) => ({ segment_id: i.segment_id, from: i.original_label, to: i.effective_label }));
  }
}
