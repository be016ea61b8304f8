import http from "node:http";
import type { AddressInfo } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";
import { nodeFetch } from "./helpers/nodeFetch.js";

interface SeenRequest {
  method: string;
  path: string;
  body: unknown;
}

/** Scripted envelope server: each route returns its canned (status, body). */
function envelope(status: string, payload: unknown, sessionId: string | null = null): string {
  return JSON.stringify({ status, payload, session_id: sessionId });
}

const seen: SeenRequest[] = [];
let server: http.Server;
let baseUrl: string;

const ROUTES: Record<string, { code: number; body: string }> = {
  "POST /api/sessions": {
    code: 201,
    body: envelope("ok", { phase: "awaiting_query", time_range_minutes: 60, session_id: "s-1" }, "s-1"),
  },
  "POST /api/sessions/s-1/messages": {
    code: 200,
    body: envelope(
      "clarification_needed",
      {
        phase: "clarifying",
        time_range_minutes: 60,
        clarifications: [
          {
            id: "s-1:1",
            kind: "missing_element",
            field_path: "aggregation",
            options: ["MEAN", "P95"],
            prompt_text: "Which aggregation?",
          },
        ],
      },
      "s-1",
    ),
  },
  "POST /api/sessions/s-2/messages": {
    code: 200,
    body: envelope("ok", { phase: "previewable", time_range_minutes: 60, preview_ready: true }, "s-2"),
  },
  "POST /api/sessions/s-3/messages": {
    code: 200,
    body: envelope("error", { code: "parse_failed", message: "no JSON object found", phase: "failed" }, "s-3"),
  },
  "POST /api/sessions/s-4/messages": {
    code: 422,
    body: envelope("error", { code: "invalid_choice", message: "choice 'zzz' is not among the options" }, "s-4"),
  },
  "GET /api/sessions/s-2/preview": {
    code: 200,
    body: envelope(
      "ok",
      {
        widget: { type: "bigNumber", title: "t", config: {}, time_range: { last_minutes: 60 } },
        widget_id: "w-1",
        data: { points: [[0, 1]], value: 1 },
      },
      "s-2",
    ),
  },
  "POST /api/sessions/s-2/confirm": {
    code: 200,
    body: envelope(
      "ok",
      { widget_id: "dash-1", widget: { type: "bigNumber", title: "t", config: {}, time_range: { last_minutes: 60 } } },
      "s-2",
    ),
  },
  "GET /api/dashboard": {
    code: 200,
    body: envelope("ok", { widgets: [{ id: "dash-1", created_at: 1, widget: { type: "pie", title: "p", config: {}, time_range: { last_minutes: 60 } } }] }),
  },
  "POST /api/kb/refresh": {
    code: 200,
    body: envelope("ok", { refreshed: true, services: 3 }),
  },
  "GET /api/sessions/missing/preview": {
    code: 404,
    body: envelope("error", { code: "unknown_session", message: "'missing'" }, "missing"),
  },
};

beforeAll(async () => {
  server = http.createServer((request, response) => {
    const chunks: Buffer[] = [];
    request.on("data", (chunk: Buffer) => chunks.push(chunk));
    request.on("end", () => {
      const raw = Buffer.concat(chunks).toString("utf-8");
      seen.push({
        method: request.method ?? "",
        path: request.url ?? "",
        body: raw ? JSON.parse(raw) : null,
      });
      const route = ROUTES[`${request.method} ${request.url}`];
      if (!route) {
        response.writeHead(500, { "content-type": "application/json" });
        response.end(envelope("error", { code: "unrouted", message: "no such route" }));
        return;
      }
      response.writeHead(route.code, { "content-type": "application/json" });
      response.end(route.body);
    });
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const address = server.address() as AddressInfo;
  baseUrl = `http://127.0.0.1:${address.port}`;
});

afterAll(() => {
  server.close();
});

function client(): ApiClient {
  return new ApiClient(baseUrl, nodeFetch);
}

describe("ApiClient", () => {
  it("creates a session and returns its id", async () => {
    const { sessionId, view } = await client().createSession();
    expect(sessionId).toBe("s-1");
    expect(view.phase).toBe("awaiting_query");
    const last = seen.at(-1);
    expect(last).toMatchObject({ method: "POST", path: "/api/sessions" });
  });

  it("posts a query and surfaces clarification requests in server order", async () => {
    const outcome = await client().sendQuery("s-1", "show latency");
    expect(outcome.kind).toBe("clarifications");
    if (outcome.kind !== "clarifications") {
      throw new Error("unreachable");
    }
    expect(outcome.requests.map((r) => r.id)).toEqual(["s-1:1"]);
    expect(outcome.requests[0]?.options).toEqual(["MEAN", "P95"]);
    expect(seen.at(-1)?.body).toEqual({ query: "show latency" });
  });

  it("posts clarification answers as answer envelopes", async () => {
    const outcome = await client().answerClarification("s-2", "s-2:1", "MEAN");
    expect(outcome.kind).toBe("state");
    if (outcome.kind !== "state") {
      throw new Error("unreachable");
    }
    expect(outcome.view.preview_ready).toBe(true);
    expect(seen.at(-1)?.body).toEqual({ answer: { request_id: "s-2:1", choice: "MEAN" } });
  });

  it("posts time-range updates", async () => {
    await client().setTimeRange("s-2", 30);
    expect(seen.at(-1)?.body).toEqual({ time_range: 30 });
  });

  it("reports a failed parse as an outcome, not an exception", async () => {
    const outcome = await client().sendQuery("s-3", "gibberish");
    expect(outcome).toEqual({ kind: "parse_failed", message: "no JSON object found" });
  });

  it("maps non-2xx responses to ApiError with the service's code", async () => {
    const error = await client()
      .answerClarification("s-4", "s-4:1", "zzz")
      .then(() => null)
      .catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    const apiError = error as ApiError;
    expect(apiError.httpStatus).toBe(422);
    expect(apiError.code).toBe("invalid_choice");
    expect(apiError.message).toContain("not among the options");
  });

  it("fetches previews with widget, id, and data", async () => {
    const preview = await client().fetchPreview("s-2");
    expect(preview.widget_id).toBe("w-1");
    expect(preview.widget.type).toBe("bigNumber");
    expect(preview.data?.value).toBe(1);
  });

  it("maps 404 preview lookups to unknown_session", async () => {
    const error = await client()
      .fetchPreview("missing")
      .then(() => null)
      .catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).httpStatus).toBe(404);
    expect((error as ApiError).code).toBe("unknown_session");
  });

  it("confirms widgets and returns the dashboard entry id", async () => {
    const confirmed = await client().confirmWidget("s-2");
    expect(confirmed.widget_id).toBe("dash-1");
  });

  it("lists the dashboard and refreshes the catalog", async () => {
    const widgets = await client().fetchDashboard();
    expect(widgets).toHaveLength(1);
    expect(widgets[0]?.id).toBe("dash-1");
    const refresh = await client().refreshCatalog();
    expect(refresh.refreshed).toBe(true);
  });
});
