// Typed client for the session service. The client never computes filtered
// data; it only posts interactions and refetches server state.

import type { Cell, Interval, MutationResponse, StateDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class Client {
  constructor(
    private base = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  async createSession(pkg?: string): Promise<{ id: string; version: number; counts: Record<string, number> }> {
    return this.request("POST", "/sessions", pkg ? { package: pkg } : {});
  }

  async state(sessionId: string): Promise<StateDoc> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  async chat(sessionId: string, text: string, version?: number): Promise<MutationResponse> {
    return this.request("POST", `/sessions/${sessionId}/chat`, { text, version });
  }

  async patchFilter(
    sessionId: string,
    name: string,
    body: { values?: Cell[][]; intervals?: Record<string, Interval>; version?: number },
  ): Promise<MutationResponse> {
    return this.request("PATCH", `/sessions/${sessionId}/filters/${name}`, body);
  }

  async removeFilter(sessionId: string, name: string, version?: number): Promise<MutationResponse> {
    const query = version === undefined ? "" : `?version=${version}`;
    return this.request("DELETE", `/sessions/${sessionId}/filters/${name}${query}`);
  }

  async brush(
    sessionId: string,
    vizId: string,
    body: { values?: Cell[][]; intervals?: Record<string, Interval>; clear?: boolean; version?: number },
  ): Promise<MutationResponse> {
    return this.request("POST", `/sessions/${sessionId}/viz/${vizId}/brush`, body);
  }

  async patchFields(
    sessionId: string,
    vizId: string,
    channel: string,
    field: string,
    version?: number,
  ): Promise<MutationResponse> {
    return this.request("PATCH", `/sessions/${sessionId}/viz/${vizId}/fields`, {
      channel,
      field,
      version,
    });
  }

  async dismissViz(sessionId: string, vizId: string, version?: number): Promise<MutationResponse> {
    const query = version === undefined ? "" : `?version=${version}`;
    return this.request("DELETE", `/sessions/${sessionId}/viz/${vizId}${query}`);
  }

  downloadUrl(sessionId: string, entity: string): string {
    return `${this.base}/sessions/${sessionId}/download?entity=${encodeURIComponent(entity)}`;
  }

  async downloadCsv(sessionId: string, entity: string): Promise<string> {
    const response = await this.fetchFn(this.downloadUrl(sessionId, entity));
    if (!response.ok) {
      throw new ApiError(response.status, "DownloadFailed", await response.text());
    }
    return response.text();
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let code = "HttpError";
      let message = text;
      try {
        const doc = JSON.parse(text);
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 100,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
