import { describe, expect, it } from "vitest";
import { Transcript } from "../src/transcript.js";

describe("Transcript", () => {
  it("renders messages in append order, matching the conversation", () => {
    const transcript = new Transcript();
    transcript.append({ role: "user", text: "show latency" });
    transcript.append({ role: "assistant", text: "Which aggregation?" });
    transcript.append({ role: "user", text: "MEAN" });
    transcript.append({ role: "assistant", text: "Here's a preview" });

    const articles = Array.from(
      transcript.element.querySelectorAll<HTMLElement>('[data-role="chat-message"]'),
    );
    expect(articles.map((a) => a.dataset.chatRole)).toEqual([
      "user",
      "assistant",
      "user",
      "assistant",
    ]);
    expect(articles.map((a) => a.querySelector(".message-text")?.textContent)).toEqual([
      "show latency",
      "Which aggregation?",
      "MEAN",
      "Here's a preview",
    ]);
    expect(transcript.messages.map((m) => m.role)).toEqual([
      "user",
      "assistant",
      "user",
      "assistant",
    ]);
  });

  it("mounts attachment elements inside their message", () => {
    const transcript = new Transcript();
    const dropdown = document.createElement("div");
    dropdown.dataset.role = "clarification";
    const article = transcript.append(
      {
        role: "assistant",
        text: "Which service?",
        attachment: {
          kind: "clarification",
          request: { id: "s:1", kind: "disambiguation", field_path: "filter.service.name", options: ["a", "b"], prompt_text: "Which service?" },
        },
      },
      dropdown,
    );
    expect(article.querySelector('[data-role="clarification"]')).toBe(dropdown);
  });
});
