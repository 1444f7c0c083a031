/**
 * Typed client for the graph service.
 *
 * Mutating UI state from out-of-order responses is the classic
 * exploration-client bug, so every read endpoint carries a sequence
 * number: a response is delivered only if no newer request for the same
 * endpoint has been issued since, otherwise the caller gets `null` and
 * should simply keep the newer result.
 */

import {
  ApiError,
  ArticlePayload,
  EntitiesPayload,
  QueryPayload,
  QuerySpec,
  SummaryPayload,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ServiceRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

interface GraphStatsPayload {
  node_count: number;
  edge_count: number;
  description_count: number;
  nodes_per_type: Record<string, number>;
}

export class ApiClient {
  private seq: Record<string, number> = {};

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private nextSeq(endpoint: string): number {
    this.seq[endpoint] = (this.seq[endpoint] ?? 0) + 1;
    return this.seq[endpoint];
  }

  private isCurrent(endpoint: string, seq: number): boolean {
    return this.seq[endpoint] === seq;
  }

  private async request<T>(
    endpoint: string,
    url: string,
    init?: { method?: string; body?: string },
  ): Promise<T | null> {
    const seq = this.nextSeq(endpoint);
    const resp = await this.fetchFn(this.baseUrl + url, {
      method: init?.method ?? "GET",
      headers: { "Content-Type": "application/json" },
      body: init?.body,
    });
    const body = await resp.json();
    if (!this.isCurrent(endpoint, seq)) {
      return null; // superseded while in flight; discard
    }
    if (resp.status >= 400) {
      const err = body as ApiError;
      throw new ServiceRequestError(
        resp.status,
        err.error?.code ?? "unknown",
        err.error?.message ?? `request failed with ${resp.status}`,
      );
    }
    return body as T;
  }

  entities(q: string, type = "", limit = 20): Promise<EntitiesPayload | null> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    if (type) params.set("type", type);
    return this.request("entities", `/entities?${params}`);
  }

  query(spec: QuerySpec): Promise<QueryPayload | null> {
    return this.request("query", "/query", {
      method: "POST",
      body: JSON.stringify(spec),
    });
  }

  summary(path: string[]): Promise<SummaryPayload | null> {
    return this.request("summary", "/summary", {
      method: "POST",
      body: JSON.stringify({ path }),
    });
  }

  article(docId: string, types: string[] = []): Promise<ArticlePayload | null> {
    return this.request("article", "/article", {
      method: "POST",
      body: JSON.stringify({ doc_id: docId, types }),
    });
  }

  stats(): Promise<GraphStatsPayload | null> {
    return this.request("stats", "/graph/stats");
  }
}

/** Serialize a query spec into URL-safe state for shareable sessions. */
export function specToUrlState(spec: QuerySpec): string {
  return encodeURIComponent(JSON.stringify(spec));
}

export function specFromUrlState(state: string): QuerySpec {
  return JSON.parse(decodeURIComponent(state)) as QuerySpec;
}
