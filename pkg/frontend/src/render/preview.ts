/**
 * Preview panel: the widget's visual form plus a confirm action.
 *
 * Each widget type renders its designated form (line chart, numeral, pie,
 * ranked bars, gauge); an empty data window renders the "no data in
 * window" placeholder instead. The "Go for it!" button posts the confirm
 * and, on success, the app moves the widget onto the canvas.
 */

import { buildVisual } from "./charts.js";
import type { PreviewPayload } from "../types.js";

export interface PreviewHandlers {
  /** Posts the confirm; rejects if the service refuses it. */
  confirm: () => Promise<void>;
}

export const CONFIRM_LABEL = "Go for it!";

export function render_preview(preview: PreviewPayload, handlers: PreviewHandlers): HTMLElement {
  const figure = document.createElement("figure");
  figure.className = "preview";
  figure.dataset.role = "preview";
  figure.dataset.widgetType = preview.widget.type;
  figure.dataset.widgetId = preview.widget_id;

  const caption = document.createElement("figcaption");
  caption.className = "preview-title";
  caption.dataset.role = "preview-title";
  caption.textContent = preview.widget.title;
  figure.appendChild(caption);

  figure.appendChild(buildVisual(preview.widget, preview.data));

  if (preview.warning) {
    const warning = document.createElement("p");
    warning.className = "preview-warning";
    warning.dataset.role = "preview-warning";
    warning.textContent = preview.warning;
    figure.appendChild(warning);
  }

  const button = document.createElement("button");
  button.type = "button";
  button.dataset.role = "confirm";
  button.className = "confirm";
  button.textContent = CONFIRM_LABEL;
  button.addEventListener("click", () => {
    button.disabled = true;
    void handlers
      .confirm()
      .then(() => {
        figure.dataset.confirmed = "true";
        button.textContent = "On the dashboard";
      })
      .catch(() => {
        button.disabled = false;
        let note = figure.querySelector<HTMLParagraphElement>('[data-role="confirm-error"]');
        if (!note) {
          note = document.createElement("p");
          note.className = "validation-error";
          note.dataset.role = "confirm-error";
          figure.appendChild(note);
        }
        note.textContent = "confirming failed; try again";
      });
  });
  figure.appendChild(button);
  return figure;
}
