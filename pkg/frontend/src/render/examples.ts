/**
 * Starter-prompt panel: one example query per widget type.
 *
 * Clicking an example only fills the input box — nothing is sent until
 * the user presses Enter (or the send button), so browsing examples never
 * touches the network.
 */

import type { WidgetType } from "../types.js";

export interface ExamplePrompt {
  label: string;
  query: string;
  widgetType: WidgetType;
}

export const EXAMPLE_PROMPTS: readonly ExamplePrompt[] = [
  {
    label: "Latency over time",
    query: "Show appdata-writer latency over time",
    widgetType: "TIME_SERIES",
  },
  {
    label: "Call volume",
    query: "How many calls did we handle in the last hour?",
    widgetType: "bigNumber",
  },
  {
    label: "Erroneous call share",
    query: "Break down erroneous calls as a pie chart",
    widgetType: "pie",
  },
  {
    label: "Busiest endpoints",
    query: "Top 5 endpoints by call volume",
    widgetType: "topList",
  },
  {
    label: "SLO status",
    query: "Show the status of the Great Expectations SLO",
    widgetType: "slo2",
  },
];

export function render_examples_panel(onPick: (query: string) => void): HTMLElement {
  const panel = document.createElement("aside");
  panel.className = "examples-panel";
  panel.dataset.role = "examples-panel";

  const heading = document.createElement("h2");
  heading.textContent = "Try one of these";
  panel.appendChild(heading);

  const list = document.createElement("ul");
  list.className = "examples-list";
  for (const example of EXAMPLE_PROMPTS) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "example";
    button.dataset.role = "example";
    button.dataset.widgetType = example.widgetType;
    button.dataset.query = example.query;

    const label = document.createElement("span");
    label.className = "example-label";
    label.textContent = example.label;
    const query = document.createElement("span");
    query.className = "example-query";
    query.textContent = example.query;

    button.append(label, query);
    button.addEventListener("click", () => onPick(example.query));
    item.appendChild(button);
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}
