/**
 * Wire and domain types for the widget-builder UI.
 *
 * The wire types mirror the HTTP service exactly: every response is an
 * envelope {status, payload, session_id} and every state change the UI
 * shows comes from one of those responses.
 */

/** Canonical widget type tokens, as they appear in widget JSON. */
export type WidgetType = "TIME_SERIES" | "bigNumber" | "pie" | "topList" | "slo2";

export const WIDGET_TYPES: readonly WidgetType[] = [
  "TIME_SERIES",
  "bigNumber",
  "pie",
  "topList",
  "slo2",
];

// ---------------------------------------------------------------------------
// HTTP envelope
// ---------------------------------------------------------------------------

export type EnvelopeStatus = "ok" | "clarification_needed" | "error";

export interface Envelope<P = unknown> {
  status: EnvelopeStatus;
  payload: P;
  session_id: string | null;
}

export interface ErrorPayload {
  code: string;
  message: string;
  phase?: string;
}

// ---------------------------------------------------------------------------
// Session payloads
// ---------------------------------------------------------------------------

export interface ClarificationRequest {
  id: string;
  kind: string;
  field_path: string;
  options: string[];
  prompt_text: string;
}

export interface SessionView {
  phase: string;
  time_range_minutes: number;
  clarifications?: ClarificationRequest[];
  preview_ready?: boolean;
  session_id?: string;
}

// ---------------------------------------------------------------------------
// Widget documents and preview data
// ---------------------------------------------------------------------------

export interface TimeRange {
  last_minutes: number;
}

/** A widget document as served by the API (type, title, config, time_range). */
export interface WidgetDocument {
  type: WidgetType;
  title: string;
  config: Record<string, unknown>;
  time_range: TimeRange;
}

export interface MetricGroup {
  name: string;
  value: number;
}

/**
 * Preview data returned by the monitoring data API: a point series plus a
 * scalar rollup, and — for grouped requests — per-group values.
 */
export interface MetricData {
  points?: [number, number][];
  value?: number;
  groups?: MetricGroup[];
}

export interface PreviewPayload {
  widget: WidgetDocument;
  widget_id: string;
  data: MetricData | null;
  warning?: string;
}

export interface ConfirmPayload {
  widget_id: string;
  widget: WidgetDocument;
}

export interface DashboardEntry {
  id: string;
  created_at: number;
  widget: WidgetDocument;
}

export interface CatalogRefreshPayload {
  refreshed: boolean;
  notice?: string;
  [key: string]: unknown;
}

// ---------------------------------------------------------------------------
// Chat domain types
// ---------------------------------------------------------------------------

export type ChatRole = "user" | "assistant";

export type MessageAttachment =
  | { kind: "clarification"; request: ClarificationRequest }
  | { kind: "preview"; preview: PreviewPayload };

/**
 * One transcript entry. Messages render in transcript order; a
 * clarification attachment renders as an interactive dropdown, a preview
 * attachment as a chart panel with a confirm action.
 */
export interface ChatMessage {
  role: ChatRole;
  text: string;
  attachment?: MessageAttachment;
}

// ---------------------------------------------------------------------------
// Canvas domain types
// ---------------------------------------------------------------------------

export interface GridPosition {
  row: number;
  column: number;
}

export interface CanvasEntry {
  widgetId: string;
  widget: WidgetDocument;
  data: MetricData | null;
}

/**
 * The dashboard canvas: an ordered list of confirmed widgets plus their
 * grid positions (layout[i] is the position of widgets[i]). At most one
 * entry exists per confirmed widget id.
 */
export interface CanvasState {
  widgets: CanvasEntry[];
  layout: GridPosition[];
}
