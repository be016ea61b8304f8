/**
 * Interactive dropdown for one clarification request.
 *
 * Options appear exactly in server order with nothing preselected; picking
 * one posts the answer. A 422 rejection (invalid choice, bad field) shows
 * an inline validation message and re-enables the control so the user can
 * pick again. Requests that arrive without options render a disabled
 * control plus an error banner — except SLO-name requests, which fall back
 * to free text because an empty catalog leaves nothing to list.
 */

import { ApiError } from "../api.js";
import type { ClarificationRequest } from "../types.js";

export interface ClarificationHandlers {
  /** Posts the answer; rejects with ApiError on a server-side refusal. */
  submit: (requestId: string, choice: string) => Promise<void>;
}

const PLACEHOLDER_LABEL = "Choose an option…";

function validationMessage(container: HTMLElement): HTMLParagraphElement {
  let message = container.querySelector<HTMLParagraphElement>('[data-role="validation-message"]');
  if (!message) {
    message = document.createElement("p");
    message.className = "validation-error";
    message.dataset.role = "validation-message";
    container.appendChild(message);
  }
  return message;
}

function describeRejection(error: unknown): string {
  if (error instanceof ApiError) {
    return error.message;
  }
  return "the answer could not be delivered; try again";
}

function buildDropdown(
  container: HTMLElement,
  request: ClarificationRequest,
  handlers: ClarificationHandlers,
): void {
  const select = document.createElement("select");
  select.dataset.role = "clarification-select";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent = PLACEHOLDER_LABEL;
  placeholder.disabled = true;
  placeholder.selected = true;
  select.appendChild(placeholder);
  for (const option of request.options) {
    const element = document.createElement("option");
    element.value = option;
    element.textContent = option;
    select.appendChild(element);
  }
  select.addEventListener("change", () => {
    const choice = select.value;
    if (!choice) {
      return;
    }
    select.disabled = true;
    void handlers
      .submit(request.id, choice)
      .then(() => {
        container.dataset.answered = "true";
        const stale = container.querySelector('[data-role="validation-message"]');
        stale?.remove();
      })
      .catch((error: unknown) => {
        select.disabled = false;
        select.value = "";
        validationMessage(container).textContent = describeRejection(error);
      });
  });
  container.appendChild(select);
}

function buildFreeTextFallback(
  container: HTMLElement,
  request: ClarificationRequest,
  handlers: ClarificationHandlers,
): void {
  const input = document.createElement("input");
  input.type = "text";
  input.dataset.role = "slo-name-input";
  input.placeholder = "Type the SLO name";
  const button = document.createElement("button");
  button.type = "button";
  button.dataset.role = "slo-name-submit";
  button.textContent = "Use this name";
  const send = () => {
    const choice = input.value.trim();
    if (!choice) {
      return;
    }
    input.disabled = true;
    button.disabled = true;
    void handlers
      .submit(request.id, choice)
      .then(() => {
        container.dataset.answered = "true";
      })
      .catch((error: unknown) => {
        input.disabled = false;
        button.disabled = false;
        validationMessage(container).textContent = describeRejection(error);
      });
  };
  button.addEventListener("click", send);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      event.preventDefault();
      send();
    }
  });
  container.append(input, button);
}

function buildDisabledControl(container: HTMLElement): void {
  const select = document.createElement("select");
  select.dataset.role = "clarification-select";
  select.disabled = true;
  const banner = document.createElement("p");
  banner.className = "error-banner";
  banner.dataset.role = "error-banner";
  banner.textContent = "No options are available for this question.";
  container.append(select, banner);
}

export function render_clarification(
  request: ClarificationRequest,
  handlers: ClarificationHandlers,
): HTMLElement {
  const container = document.createElement("div");
  container.className = "clarification";
  container.dataset.role = "clarification";
  container.dataset.requestId = request.id;
  container.dataset.fieldPath = request.field_path;
  container.dataset.kind = request.kind;

  const prompt = document.createElement("p");
  prompt.className = "clarification-prompt";
  prompt.dataset.role = "clarification-prompt";
  prompt.textContent = request.prompt_text;
  container.appendChild(prompt);

  if (request.options.length > 0) {
    buildDropdown(container, request, handlers);
  } else if (request.field_path === "slo_name") {
    buildFreeTextFallback(container, request, handlers);
  } else {
    buildDisabledControl(container);
  }
  return container;
}
