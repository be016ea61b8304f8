/**
 * Dashboard canvas: confirmed widgets laid out on a simple append-to-grid.
 *
 * New widgets take the next free cell left-to-right, top-to-bottom. At
 * most one entry exists per confirmed widget id — confirming the same
 * widget twice cannot duplicate it on the canvas.
 */

import { buildVisual } from "./render/charts.js";
import type { CanvasState, GridPosition, MetricData, WidgetDocument } from "./types.js";

export const CANVAS_COLUMNS = 3;

export class DashboardCanvas {
  readonly state: CanvasState = { widgets: [], layout: [] };
  readonly element: HTMLElement;

  constructor(element?: HTMLElement) {
    this.element = element ?? document.createElement("section");
    this.element.classList.add("canvas");
    this.element.dataset.role = "canvas";
  }

  has(widgetId: string): boolean {
    return this.state.widgets.some((entry) => entry.widgetId === widgetId);
  }

  positionOf(widgetId: string): GridPosition | null {
    const index = this.state.widgets.findIndex((entry) => entry.widgetId === widgetId);
    return index === -1 ? null : (this.state.layout[index] ?? null);
  }

  /** Append a confirmed widget; re-adding an existing id is a no-op. */
  addWidget(widgetId: string, widget: WidgetDocument, data: MetricData | null): GridPosition {
    const existing = this.positionOf(widgetId);
    if (existing) {
      return existing;
    }
    const index = this.state.widgets.length;
    const position: GridPosition = {
      row: Math.floor(index / CANVAS_COLUMNS),
      column: index % CANVAS_COLUMNS,
    };
    this.state.widgets.push({ widgetId, widget, data });
    this.state.layout.push(position);

    const cell = document.createElement("section");
    cell.className = "canvas-cell";
    cell.dataset.role = "canvas-widget";
    cell.dataset.widgetId = widgetId;
    cell.dataset.widgetType = widget.type;
    cell.dataset.row = String(position.row);
    cell.dataset.column = String(position.column);
    cell.style.gridRow = String(position.row + 1);
    cell.style.gridColumn = String(position.column + 1);

    const title = document.createElement("h3");
    title.className = "canvas-title";
    title.textContent = widget.title;
    cell.appendChild(title);
    cell.appendChild(buildVisual(widget, data));
    this.element.appendChild(cell);
    return position;
  }
}
