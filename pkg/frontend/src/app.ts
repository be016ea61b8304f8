/**
 * Application shell: examples panel + chat transcript + composer + canvas.
 *
 * Every state change flows through the HTTP service — the UI never
 * interprets queries itself and never renders optimistically: each
 * transcript or canvas mutation reflects a server response that already
 * happened. One session is active per tab; once a session reaches a
 * terminal phase (confirmed widget or failed parse) a fresh one is opened
 * for the next conversation.
 */

import { ApiClient, ApiError, type MessageOutcome } from "./api.js";
import { DashboardCanvas } from "./canvas.js";
import { render_clarification } from "./render/clarification.js";
import { render_examples_panel } from "./render/examples.js";
import { render_preview } from "./render/preview.js";
import { Transcript } from "./transcript.js";
import type { MetricData } from "./types.js";

export interface WidgetApp {
  readonly root: HTMLElement;
  readonly client: ApiClient;
  readonly transcript: Transcript;
  readonly canvas: DashboardCanvas;
  readonly input: HTMLInputElement;
  readonly sessionId: string;
  /** Send a query exactly as if the user typed it and pressed Enter. */
  submitQuery(text: string): Promise<void>;
}

function statusBanner(root: HTMLElement): HTMLElement {
  const banner = root.querySelector<HTMLElement>('[data-role="status-banner"]');
  if (!banner) {
    throw new Error("status banner missing");
  }
  return banner;
}

export async function createApp(root: HTMLElement, client: ApiClient): Promise<WidgetApp> {
  root.textContent = "";
  root.classList.add("app-shell");

  const transcript = new Transcript();
  const canvas = new DashboardCanvas();

  const main = document.createElement("main");
  main.className = "chat-pane";

  const banner = document.createElement("div");
  banner.className = "status-banner";
  banner.dataset.role = "status-banner";
  banner.hidden = true;

  const form = document.createElement("form");
  form.className = "composer";
  form.dataset.role = "composer";
  const input = document.createElement("input");
  input.type = "text";
  input.dataset.role = "query-input";
  input.placeholder = "Describe the widget you want…";
  const send = document.createElement("button");
  send.type = "submit";
  send.dataset.role = "send";
  send.textContent = "Send";
  form.append(input, send);

  main.append(transcript.element, banner, form);

  const examples = render_examples_panel((query) => {
    input.value = query;
    input.focus();
  });

  const canvasPane = document.createElement("section");
  canvasPane.className = "canvas-pane";
  const canvasHeading = document.createElement("h2");
  canvasHeading.textContent = "Dashboard";
  canvasPane.append(canvasHeading, canvas.element);

  root.append(examples, main, canvasPane);

  let sessionId = (await client.createSession()).sessionId;
  let busy = false;

  function setBusy(value: boolean): void {
    busy = value;
    input.disabled = value;
    send.disabled = value;
  }

  function showError(message: string): void {
    banner.textContent = message;
    banner.hidden = false;
  }

  function clearError(): void {
    banner.hidden = true;
    banner.textContent = "";
  }

  async function resetSession(): Promise<void> {
    sessionId = (await client.createSession()).sessionId;
  }

  async function confirmCurrent(data: MetricData | null): Promise<void> {
    const confirmed = await client.confirmWidget(sessionId);
    canvas.addWidget(confirmed.widget_id, confirmed.widget, data);
    transcript.append({
      role: "assistant",
      text: `Added "${confirmed.widget.title}" to the dashboard.`,
    });
    await resetSession();
  }

  async function showPreview(): Promise<void> {
    const preview = await client.fetchPreview(sessionId);
    const panel = render_preview(preview, {
      confirm: () => confirmCurrent(preview.data),
    });
    transcript.append(
      { role: "assistant", text: "Here's a preview — happy with it?", attachment: { kind: "preview", preview } },
      panel,
    );
  }

  async function handleOutcome(outcome: MessageOutcome): Promise<void> {
    if (outcome.kind === "parse_failed") {
      transcript.append({
        role: "assistant",
        text: `I couldn't turn that into a widget: ${outcome.message}`,
      });
      await resetSession();
      return;
    }
    if (outcome.kind === "clarifications") {
      const head = outcome.requests[0];
      if (!head) {
        showError("the service asked for clarification but sent no request");
        return;
      }
      const dropdown = render_clarification(head, { submit: submitAnswer });
      transcript.append(
        { role: "assistant", text: head.prompt_text, attachment: { kind: "clarification", request: head } },
        dropdown,
      );
      return;
    }
    if (outcome.view.preview_ready || outcome.view.phase === "previewable") {
      await showPreview();
    }
  }

  async function submitAnswer(requestId: string, choice: string): Promise<void> {
    clearError();
    setBusy(true);
    try {
      const outcome = await client.answerClarification(sessionId, requestId, choice);
      transcript.append({ role: "user", text: choice });
      await handleOutcome(outcome);
    } catch (error) {
      if (error instanceof ApiError && error.httpStatus !== 422) {
        showError(error.message);
      }
      throw error;
    } finally {
      setBusy(false);
    }
  }

  async function submitQuery(text: string): Promise<void> {
    const query = text.trim();
    if (!query || busy) {
      return;
    }
    clearError();
    setBusy(true);
    try {
      const outcome = await client.sendQuery(sessionId, query);
      transcript.append({ role: "user", text: query });
      input.value = "";
      await handleOutcome(outcome);
    } catch (error) {
      showError(error instanceof Error ? error.message : String(error));
    } finally {
      setBusy(false);
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitQuery(input.value);
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      event.preventDefault();
      void submitQuery(input.value);
    }
  });

  return {
    root,
    client,
    transcript,
    canvas,
    input,
    get sessionId() {
      return sessionId;
    },
    submitQuery,
  };
}

export { statusBanner };
