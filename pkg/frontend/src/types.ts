export type Label = "Present" | "Absent" | "Unknown";
export type ReviewStatus = "unreviewed" | "confirmed" | "relabeled";
export type ImageKind = "wst" | "stft";

export interface ReviewItem {
  segment_id: string;
  recording_id: string;
  location: string;
  original_label: Label;
  effective_label: Label;
  status: ReviewStatus;
  note: string;
}

export interface SegmentPage {
  items: ReviewItem[];
  total: number;
  page: number;
  page_size: number;
  counts: Partial<Record<Label, number>>;
}

/** What the reviewer can do to one item. */
export type Action = "confirm" | "relabel-unknown";

export const LABELS: readonly Label[] = ["Present", "Unknown", "Absent"];
