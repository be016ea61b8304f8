"""Chat-completion backends: a live OpenAI-compatible HTTP client and a
deterministic replay stub for tests and offline evaluation.

Decoding is always greedy with a 1024-token ceiling. The request body
deliberately carries no sampling parameters (no temperature, top_k or
top_p fields exist anywhere in this module), so two identical requests
ask the backend for identical work.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import FixtureMissError, TransportError

log = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 1024


@dataclass(frozen=True)
class CompletionRequest:
    system_prompt: str
    user_message: str
    max_tokens: int = DEFAULT_MAX_TOKENS


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    model_id: str
    latency_ms: int


def prompt_sha256(system_prompt: str) -> str:
    return hashlib.sha256(system_prompt.encode("utf-8")).hexdigest()


class HttpLLMClient:
    """POSTs to an OpenAI-compatible chat-completions endpoint.

    Retries transport failures with exponential backoff (2 retries by
    default); HTTP 4xx other than 429 is not retried, since resending the
    same bad request cannot help.
    """

    def __init__(
        self,
        api_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        retries: int = 2,
        backoff: float = 0.5,
    ):
        self.api_url = api_url
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._session = requests.Session()

    @classmethod
    def from_env(cls) -> "HttpLLMClient":
        url = os.environ.get("LLM_API_URL")
        model = os.environ.get("LLM_MODEL")
        if not url or not model:
            raise TransportError("LLM_API_URL and LLM_MODEL must be set for live mode")
        return cls(url, model, os.environ.get("LLM_API_KEY"))

    def request_body(self, req: CompletionRequest) -> dict:
        return {
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": req.user_message},
            ],
            "max_tokens": req.max_tokens,
        }

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = self.request_body(req)
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            started = time.monotonic()
            try:
                resp = self._session.post(self.api_url, json=body, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                log.warning("completion attempt %d failed: %s", attempt + 1, exc)
            else:
                if resp.status_code >= 500 or resp.status_code == 429:
                    last_error = TransportError(f"backend returned HTTP {resp.status_code}")
                    log.warning("completion attempt %d got HTTP %d", attempt + 1, resp.status_code)
                elif resp.status_code >= 400:
                    raise TransportError(f"backend rejected request: HTTP {resp.status_code}", retries=attempt)
                else:
                    payload = resp.json()
                    try:
                        text = payload["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError) as exc:
                        raise TransportError(f"malformed completion payload: {exc}", retries=attempt) from exc
                    if text is None or text == "":
                        raise TransportError("backend returned an empty completion", retries=attempt)
                    latency = int((time.monotonic() - started) * 1000)
                    return CompletionResponse(text=text, model_id=self.model, latency_ms=latency)
            if attempt < self.retries:
                time.sleep(self.backoff * (2 ** attempt))
        raise TransportError(f"completion failed after {self.retries + 1} attempts: {last_error}", retries=self.retries)


class ReplayLLMClient:
    """Pure-function stub keyed on (sha256(system prompt), user message).

    Fixture files are JSON arrays of {prompt_sha256, user_message, response}
    records. Identical requests always yield byte-identical responses.
    """

    MODEL_ID = "replay"

    def __init__(self, fixture_path: str | Path | None = None):
        self._responses: dict[tuple[str, str], str] = {}
        if fixture_path is not None:
            self.load(fixture_path)

    def load(self, fixture_path: str | Path) -> None:
        records = json.loads(Path(fixture_path).read_text("utf-8"))
        for rec in records:
            self._responses[(rec["prompt_sha256"], rec["user_message"])] = rec["response"]
        log.debug("replay fixture loaded: %d entries", len(self._responses))

    def add(self, system_prompt: str, user_message: str, response: str) -> None:
        self._responses[(prompt_sha256(system_prompt), user_message)] = response

    def save(self, fixture_path: str | Path) -> None:
        records = [
            {"prompt_sha256": sha, "user_message": msg, "response": resp}
            for (sha, msg), resp in sorted(self._responses.items())
        ]
        Path(fixture_path).write_text(json.dumps(records, indent=2, ensure_ascii=False) + "\n", "utf-8")

    def __len__(self) -> int:
        return len(self._responses)

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        key = (prompt_sha256(req.system_prompt), req.user_message)
        if key not in self._responses:
            raise FixtureMissError(req.user_message)
        return CompletionResponse(text=self._responses[key], model_id=self.MODEL_ID, latency_ms=0)
