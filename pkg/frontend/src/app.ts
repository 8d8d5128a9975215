/** DOM wiring for the review queue; all decision logic lives in the pure
 * modules (transitions/queue/keyboard), this file only renders and routes. */
import { ApiError, ReviewApi } from "./api.js";
import { mapKey } from "./keyboard.js";
import {
  advance,
  applyPage,
  currentItem,
  emptyQueue,
  needsNextPage,
  queuePositionLabel,
  recordDecision,
  retreat,
  type QueueState,
} from "./queue.js";
import { legalActions } from "./transitions.js";
import type { Action, ImageKind, ReviewStatus } from "./types.js";

const ACTION_TITLES: Record<Action, string> = {
  confirm: "Confirm label (C)",
  "relabel-unknown": "Mark noise-only -> Unknown (U)",
};

export class ReviewApp {
  private state: QueueState = emptyQueue();
  private imageKind: ImageKind = "wst";
  private audio: HTMLAudioElement | null = null;

  constructor(
    private readonly api: ReviewApi,
    private readonly root: Document,
  ) {}

  async start(): Promise<void> {
    this.root.addEventListener("keydown", (ev) => {
      if ((ev.target as HTMLElement | null)?.tagName === "SELECT") return;
      void this.onKey((ev as KeyboardEvent).key, ev);
    });
    this.byId<HTMLSelectElement>("filter").addEventListener("change", (ev) => {
      const value = (ev.target as HTMLSelectElement).value;
      this.state = emptyQueue(value === "all" ? null : (value as ReviewStatus));
      void this.refresh();
    });
    this.byId<HTMLSelectElement>("image-kind").addEventListener("change", (ev) => {
      this.imageKind = (ev.target as HTMLSelectElement).value as ImageKind;
      this.render();
    });
    await this.refresh();
  }

  private byId<T extends HTMLElement>(id: string): T {
    const el = this.root.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el as T;
  }

  private async refresh(): Promise<void> {
    try {
      const page = await this.api.listSegments(this.state.filter, this.state.page, this.state.pageSize);
      this.state = applyPage(this.state, page);
      this.render();
    } catch (err) {
      this.showError(`failed to load queue: ${describe(err)}`, () => void this.refresh());
    }
  }

  private async onKey(key: string, ev: Event): Promise<void> {
    const command = mapKey(key, currentItem(this.state));
    if (!command) return;
    ev.preventDefault();
    switch (command.kind) {
      case "play-pause":
        this.togglePlayback();
        break;
      case "next":
        this.state = advance(this.state);
        if (needsNextPage(this.state)) {
          this.state = { ...this.state, page: this.state.page + 1, position: 0 };
          await this.refresh();
        } else {
          this.render();
        }
        break;
      case "prev":
        this.state = retreat(this.state);
        this.render();
        break;
      case "action":
        await this.submit(command.action);
        break;
    }
  }

  private togglePlayback(): void {
    if (!this.audio) return;
    if (this.audio.paused) void this.audio.play();
    else this.audio.pause();
  }

  private async submit(action: Action): Promise<void> {
    const item = currentItem(this.state);
    if (!item || !legalActions(item).includes(action)) return;
    try {
      const updated = await this.api.submit(item.segment_id, action);
      this.state = recordDecision(this.state, item, updated);
      this.state = advance(this.state);
      await this.refresh(); // server is the source of truth after any 2xx
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.toast(err.message); // surfaced verbatim, queue does not move
      } else {
        this.showError(`decision failed: ${describe(err)}`, () => void this.submit(action));
      }
    }
  }

  private render(): void {
    const item = currentItem(this.state);
    this.byId("position").textContent = queuePositionLabel(this.state);
    this.renderCounts();
    const card = this.byId("card");
    card.innerHTML = "";
    if (!item) {
      card.appendChild(this.el("p", "queue-done", "No items match the current filter."));
      return;
    }

    const img = this.root.createElement("img");
    img.id = "feature-image";
    img.alt = `${this.imageKind} map for ${item.segment_id}`;
    img.src = this.api.imageUrl(item.segment_id, this.imageKind);
    img.onerror = () => {
      img.remove();
      const retry = this.el("button", "retry", "image failed, retry");
      retry.addEventListener("click", () => this.render());
      card.prepend(retry);
    };
    card.appendChild(img);

    this.audio = this.root.createElement("audio");
    this.audio.controls = true;
    this.audio.src = this.api.audioUrl(item.segment_id);
    card.appendChild(this.audio);

    const meta = this.el("div", "meta", "");
    meta.appendChild(this.el("span", `badge label-${item.original_label.toLowerCase()}`, item.original_label));
    meta.appendChild(this.el("span", `badge status-${item.status}`, item.status));
    meta.appendChild(this.el("span", "segment-id", item.segment_id));
    card.appendChild(meta);

    const buttons = this.el("div", "actions", "");
    for (const action of legalActions(item)) {
      const button = this.el("button", `action-${action}`, ACTION_TITLES[action]);
      button.addEventListener("click", () => void this.submit(action));
      buttons.appendChild(button);
    }
    card.appendChild(buttons);
  }

  private renderCounts(): void {
    const parts: string[] = [];
    for (const label of ["Present", "Unknown", "Absent"] as const) {
      parts.push(`${label}: ${this.state.counts[label] ?? 0}`);
    }
    const s = this.state.session;
    this.byId("counts").textContent = parts.join("  ");
    this.byId("session").textContent =
      `this session: ${s.confirmed} confirmed, ${s.relabeled} re-labeled to Unknown`;
  }

  private toast(message: string): void {
    const toast = this.byId("toast");
    toast.textContent = message;
    toast.classList.add("visible");
    setTimeout(() => toast.classList.remove("visible"), 4000);
  }

  private showError(message: string, retry: () => void): void {
    const card = this.byId("card");
    card.innerHTML = "";
    card.appendChild(this.el("p", "error", message));
    const button = this.el("button", "retry", "retry");
    button.addEventListener("click", retry);
    card.appendChild(button);
  }

  private el(tag: string, className: string, text: string): HTMLElement {
    const node = this.root.createElement(tag);
    node.className = className;
    node.textContent = text;
    return node;
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
