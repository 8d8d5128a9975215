/** Typed client for the review service endpoints. */
import type { Action, ImageKind, ReviewItem, ReviewStatus, SegmentPage } from "./types.js";
import { actionPayload } from "./transitions.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ReviewApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  async listSegments(status: ReviewStatus | null, page: number, pageSize = 50): Promise<SegmentPage> {
    const params = new URLSearchParams({ page: String(page), page_size: String(pageSize) });
    if (status) params.set("status", status);
    const resp = await this.fetchFn(`${this.base}/segments?${params.toString()}`);
    if (!resp.ok) throw new ApiError(resp.status, await errorText(resp));
    return (await resp.json()) as SegmentPage;
  }

  audioUrl(segmentId: string): string {
    return `${this.base}/segments/${segmentId}/audio`;
  }

  imageUrl(segmentId: string, kind: ImageKind): string {
    return `${this.base}/segments/${segmentId}/image?kind=${kind}`;
  }

  /** POST one decision; resolves to the updated item, throws ApiError on 4xx. */
  async submit(segmentId: string, action: Action): Promise<ReviewItem> {
    const resp = await this.fetchFn(`${this.base}/segments/${segmentId}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ to: actionPayload(action) }),
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorText(resp));
    return (await resp.json()) as ReviewItem;
  }

  async exportRelabels(): Promise<string> {
    const resp = await this.fetchFn(`${this.base}/export`);
    if (!resp.ok) throw new ApiError(resp.status, await errorText(resp));
    return await resp.text();
  }
}

async function errorText(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    return body.error ?? `HTTP ${resp.status}`;
  } catch {
    return `HTTP ${resp.status}`;
  }
}
