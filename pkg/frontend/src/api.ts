/**
 * HTTP client for the widget-builder service.
 *
 * The UI is a pure client of this API: it never extracts or resolves
 * anything locally, it only posts messages and renders what comes back.
 */

import type {
  CatalogRefreshPayload,
  ClarificationRequest,
  ConfirmPayload,
  DashboardEntry,
  Envelope,
  ErrorPayload,
  PreviewPayload,
  SessionView,
} from "./types.js";

/** Structural subset of the WHATWG Response the client relies on. */
export interface HttpResponse {
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
}

export interface HttpRequestInit {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export type FetchLike = (url: string, init?: HttpRequestInit) => Promise<HttpResponse>;

/** A non-2xx response from the service, carrying its machine-readable code. */
export class ApiError extends Error {
  constructor(
    readonly httpStatus: number,
    readonly code: string,
    message: string,
    readonly sessionId: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type MessageBody =
  | { query: string }
  | { answer: { request_id: string; choice: string } }
  | { time_range: number };

/**
 * What a posted message produced, as a discriminated union:
 * - "clarifications": the service needs answers before a preview exists;
 * - "state": an ok session-state payload (previewable when preview_ready);
 * - "parse_failed": the query could not be interpreted (a terminal state
 *   for the session, reported inside a 200 envelope).
 */
export type MessageOutcome =
  | { kind: "clarifications"; requests: ClarificationRequest[]; view: SessionView }
  | { kind: "state"; view: SessionView }
  | { kind: "parse_failed"; message: string };

function defaultFetch(): FetchLike {
  const f = (globalThis as { fetch?: unknown }).fetch;
  if (typeof f !== "function") {
    throw new Error("no fetch implementation available; pass one to ApiClient");
  }
  return (f as (url: string, init?: HttpRequestInit) => Promise<HttpResponse>).bind(globalThis);
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? defaultFetch();
  }

  private async request<P>(method: string, path: string, body?: unknown): Promise<Envelope<P>> {
    const init: HttpRequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const envelope = (await response.json()) as Envelope<P>;
    if (!response.ok) {
      const payload = envelope.payload as unknown as ErrorPayload;
      throw new ApiError(
        response.status,
        payload?.code ?? "unknown_error",
        payload?.message ?? `request failed with HTTP ${response.status}`,
        envelope.session_id,
      );
    }
    return envelope;
  }

  /** POST /api/sessions → a fresh session id plus its initial view. */
  async createSession(): Promise<{ sessionId: string; view: SessionView }> {
    const envelope = await this.request<SessionView>("POST", "/api/sessions");
    const sessionId = envelope.session_id ?? envelope.payload.session_id;
    if (!sessionId) {
      throw new ApiError(500, "missing_session_id", "service returned no session id");
    }
    return { sessionId, view: envelope.payload };
  }

  /**
   * POST /api/sessions/{id}/messages. Validation and phase problems
   * (HTTP 4xx/5xx) throw ApiError; a failed parse comes back as an
   * outcome because the session itself reports it as its final state.
   */
  async sendMessage(sessionId: string, body: MessageBody): Promise<MessageOutcome> {
    const envelope = await this.request<SessionView | ErrorPayload>(
      "POST",
      `/api/sessions/${encodeURIComponent(sessionId)}/messages`,
      body,
    );
    if (envelope.status === "error") {
      const payload = envelope.payload as ErrorPayload;
      return { kind: "parse_failed", message: payload.message };
    }
    const view = envelope.payload as SessionView;
    if (envelope.status === "clarification_needed") {
      return { kind: "clarifications", requests: view.clarifications ?? [], view };
    }
    return { kind: "state", view };
  }

  sendQuery(sessionId: string, query: string): Promise<MessageOutcome> {
    return this.sendMessage(sessionId, { query });
  }

  answerClarification(
    sessionId: string,
    requestId: string,
    choice: string,
  ): Promise<MessageOutcome> {
    return this.sendMessage(sessionId, { answer: { request_id: requestId, choice } });
  }

  setTimeRange(sessionId: string, minutes: number): Promise<MessageOutcome> {
    return this.sendMessage(sessionId, { time_range: minutes });
  }

  /** GET /api/sessions/{id}/preview → widget document plus live data. */
  async fetchPreview(sessionId: string): Promise<PreviewPayload> {
    const envelope = await this.request<PreviewPayload>(
      "GET",
      `/api/sessions/${encodeURIComponent(sessionId)}/preview`,
    );
    return envelope.payload;
  }

  /** POST /api/sessions/{id}/confirm → the dashboard entry id and widget. */
  async confirmWidget(sessionId: string): Promise<ConfirmPayload> {
    const envelope = await this.request<ConfirmPayload>(
      "POST",
      `/api/sessions/${encodeURIComponent(sessionId)}/confirm`,
    );
    return envelope.payload;
  }

  /** GET /api/dashboard → every confirmed widget, in confirmation order. */
  async fetchDashboard(): Promise<DashboardEntry[]> {
    const envelope = await this.request<{ widgets: DashboardEntry[] }>("GET", "/api/dashboard");
    return envelope.payload.widgets;
  }

  /** POST /api/kb/refresh → whether a fresh catalog snapshot was swapped in. */
  async refreshCatalog(): Promise<CatalogRefreshPayload> {
    const envelope = await this.request<CatalogRefreshPayload>("POST", "/api/kb/refresh");
    return envelope.payload;
  }
}
