export { ApiClient, ApiError } from "./api.js";
export type {
  FetchLike,
  HttpRequestInit,
  HttpResponse,
  MessageBody,
  MessageOutcome,
} from "./api.js";
export { createApp } from "./app.js";
export type { WidgetApp } from "./app.js";
export { CANVAS_COLUMNS, DashboardCanvas } from "./canvas.js";
export {
  NO_DATA_TEXT,
  buildBigNumber,
  buildLineChart,
  buildNoDataPlaceholder,
  buildPieChart,
  buildSloGauge,
  buildTopList,
  buildVisual,
  sloNameOf,
} from "./render/charts.js";
export { render_clarification } from "./render/clarification.js";
export type { ClarificationHandlers } from "./render/clarification.js";
export { EXAMPLE_PROMPTS, render_examples_panel } from "./render/examples.js";
export type { ExamplePrompt } from "./render/examples.js";
export { CONFIRM_LABEL, render_preview } from "./render/preview.js";
export type { PreviewHandlers } from "./render/preview.js";
export { Transcript } from "./transcript.js";
export * from "./types.js";
