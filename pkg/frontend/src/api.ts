// Typed fetch client for the optimization service.

import type { ParetoSummary, RatingPayload, SessionState } from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string"
      ? body.detail
      : JSON.stringify(body.detail ?? body);
  } catch {
    return res.statusText;
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!res.ok) {
      throw new ApiError(res.status, await parseDetail(res));
    }
    return res.json() as Promise<T>;
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  createSession(options: Record<string, unknown> = {}): Promise<SessionState> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify(options),
    });
  }

  getSession(id: string): Promise<SessionState> {
    return this.request(`/sessions/${id}`);
  }

  submitRating(id: string, payload: RatingPayload): Promise<SessionState> {
    return this.request(`/sessions/${id}/rating`, {
      method: "POST",
      body: JSON.stringify(payload),
    });
  }

  getPareto(id: string): Promise<ParetoSummary> {
    return this.request(`/sessions/${id}/pareto`);
  }
}
