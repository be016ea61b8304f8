/**
 * Chat transcript: an ordered list of messages mirroring the server's
 * conversation order. Appending is the only mutation — the DOM order is
 * the message order is the server order.
 */

import type { ChatMessage } from "./types.js";

export class Transcript {
  readonly messages: ChatMessage[] = [];
  readonly element: HTMLElement;

  constructor(element?: HTMLElement) {
    this.element = element ?? document.createElement("section");
    this.element.classList.add("transcript");
    this.element.dataset.role = "transcript";
  }

  /**
   * Append a message; when the message carries an attachment, the caller
   * passes the rendered attachment element (dropdown or preview panel).
   * Returns the article so callers can address it later.
   */
  append(message: ChatMessage, attachmentElement?: Element): HTMLElement {
    this.messages.push(message);
    const article = document.createElement("article");
    article.className = `message message-${message.role}`;
    article.dataset.role = "chat-message";
    article.dataset.chatRole = message.role;

    const text = document.createElement("p");
    text.className = "message-text";
    text.textContent = message.text;
    article.appendChild(text);

    if (attachmentElement) {
      article.appendChild(attachmentElement);
    }
    this.element.appendChild(article);
    return article;
  }
}
