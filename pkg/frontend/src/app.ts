// Application controller: owns the session, refetches full state after every
// acked interaction, and retries version conflicts by refetching and
// replaying the local edit once.

import { ApiError, Client, debounce } from "./api.js";
import type { RenderHandlers } from "./render.js";
import { renderState } from "./render.js";
import type { Cell, Interval, StateDoc } from "./types.js";

export const BRUSH_DEBOUNCE_MS = 100;

export class App {
  state: StateDoc | null = null;
  sessionId = "";
  readonly handlers: RenderHandlers;
  private readonly debouncedBrush: (vizId: string, intervals: Record<string, Interval>) => void;

  constructor(
    private root: HTMLElement,
    private client: Client,
    private onDownloadNavigate: (url: string) => void = (url) => {
      window.location.assign(url);
    },
  ) {
    this.debouncedBrush = debounce((vizId: string, intervals: Record<string, Interval>) => {
      void this.mutate((version) =>
        this.client.brush(this.sessionId, vizId, { intervals, version }));
    }, BRUSH_DEBOUNCE_MS);

    this.handlers = {
      onChat: (text) => {
        void this.mutate((version) => this.client.chat(this.sessionId, text, version));
      },
      onIntervalBrush: (vizId, intervals) => this.debouncedBrush(vizId, intervals),
      onPointToggle: (vizId, values: Cell[][]) => {
        void this.mutate((version) =>
          this.client.brush(this.sessionId, vizId, { values, version }));
      },
      onClearBrush: (vizId) => {
        void this.mutate((version) =>
          this.client.brush(this.sessionId, vizId, { clear: true, version }));
      },
      onFilterIntervals: (selection, intervals) => {
        void this.mutate((version) =>
          this.client.patchFilter(this.sessionId, selection, { intervals, version }));
      },
      onFilterValues: (selection, values) => {
        void this.mutate((version) =>
          this.client.patchFilter(this.sessionId, selection, { values, version }));
      },
      onFieldSwap: (vizId, channel, field) => {
        void this.mutate((version) =>
          this.client.patchFields(this.sessionId, vizId, channel, field, version));
      },
      onRemoveFilter: (selection) => {
        void this.mutate((version) =>
          this.client.removeFilter(this.sessionId, selection, version));
      },
      onDismissViz: (vizId) => {
        void this.mutate((version) =>
          this.client.dismissViz(this.sessionId, vizId, version));
      },
      onDownload: (entity) => {
        this.onDownloadNavigate(this.client.downloadUrl(this.sessionId, entity));
      },
    };
  }

  async start(pkg?: string): Promise<void> {
    const session = await this.client.createSession(pkg);
    this.sessionId = session.id;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    this.state = await this.client.state(this.sessionId);
    renderState(this.root, this.state, this.handlers);
  }

  /** Apply a mutation at the current version; on a stale-version conflict,
   * refetch and replay the edit once. Other failures toast and refetch. */
  async mutate(op: (version: number) => Promise<unknown>): Promise<void> {
    const version = this.state?.version ?? 0;
    try {
      await op(version);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.refresh();
        try {
          await op(this.state!.version);
        } catch (replayErr) {
          this.toast(replayErr);
          await this.refresh();
          return;
        }
      } else {
        this.toast(err);
        await this.refresh();
        return;
      }
    }
    await this.refresh();
  }

  private toast(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    const el = document.createElement("div");
    el.className = "toast";
    el.textContent = message;
    document.body.appendChild(el);
    setTimeout(() => el.remove(), 4000);
  }
}
