// Thin fetch wrappers over the documented review API. The fetch function is
// injectable so tests can run against an in-memory server.

import type {
  Decision,
  DecisionResponse,
  ExportResponse,
  QueueResponse,
  Stats,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Server refused the request (4xx/5xx); detail is surfaced verbatim. */
export class ApiRejection extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API rejected request (${status}): ${detail}`);
  }
}

export class ReviewApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly token: string | null = null,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      ...init,
      headers: { ...this.headers(), ...(init?.headers ?? {}) },
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body.detail !== undefined) detail = String(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiRejection(response.status, detail);
    }
    return (await response.json()) as T;
  }

  fetchQueue(kind?: string, limit?: number): Promise<QueueResponse> {
    const params = new URLSearchParams();
    if (kind) params.set('kind', kind);
    if (limit !== undefined) params.set('limit', String(limit));
    const query = params.toString();
    return this.request<QueueResponse>(`/api/queue${query ? `?${query}` : ''}`);
  }

  postDecision(decision: Decision): Promise<DecisionResponse> {
    return this.request<DecisionResponse>('/api/decisions', {
      method: 'POST',
      body: JSON.stringify(decision),
    });
  }

  fetchStats(): Promise<Stats> {
    return this.request<Stats>('/api/stats');
  }

  fetchExport(kind?: string): Promise<ExportResponse> {
    const query = kind ? `?kind=${encodeURIComponent(kind)}` : '';
    return this.request<ExportResponse>(`/api/export${query}`);
  }
}
