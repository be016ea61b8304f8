"""Multi-turn session engine.

A session drives one widget from natural-language query to confirmed
spec. Each submitted query costs at most two LLM calls (plus at most one
reprompt inside the extraction pass); everything after that, including
every clarification round, is pure bookkeeping over the resolution
outcomes computed up front.

Clarifications are issued in a fixed field order (widget_type, metric,
aggregation, filter keys alphabetically, grouping subfields, slo_name)
so multi-question sessions replay identically.
"""

from __future__ import annotations

import logging
import threading
import time
import uuid
from dataclasses import dataclass, field

from .catalog import KnowledgeBase
from .errors import (
    ContractError,
    FieldValidationError,
    InvalidChoiceError,
    OrderingError,
    ParseError,
    PhaseError,
    StoreCapacityError,
)
from .llm import CompletionRequest
from .parsing import (
    GROUPABLE_TYPES,
    ExtractionResult,
    GroupingSpec,
    extract_data_sources,
    infer_widget_type,
)
from .prompts import PromptPack
from .resolver import (
    AMBIGUOUS,
    UNRESOLVABLE,
    MatchOutcome,
    completion_options,
    resolve_extraction,
)
from .vocabulary import GlobalVocabulary
from .widgets import (
    DEFAULT_TIME_RANGE_MINUTES,
    WidgetSpec,
    build_widget_spec,
    check_previewable,
)

log = logging.getLogger(__name__)

AWAITING_QUERY = "awaiting_query"
PARSING = "parsing"
CLARIFYING = "clarifying"
PREVIEWABLE = "previewable"
CONFIRMED = "confirmed"
FAILED = "failed"

DISAMBIGUATION = "disambiguation"
MISSING_ELEMENT = "missing_element"

SESSION_IDLE_SECONDS = 30 * 60

_GROUPING_FIELDS = (
    ("group_by_tag", "grouping.group_by_tag"),
    ("direction", "grouping.direction"),
    ("max_results", "grouping.max_results"),
)


@dataclass(frozen=True)
class ClarificationRequest:
    id: str
    kind: str
    field_path: str
    options: tuple[str, ...]
    prompt_text: str


def _prompt_for(kind: str, field_path: str, options: tuple[str, ...], note: str = "") -> str:
    joined = ", ".join(options)
    if kind == DISAMBIGUATION:
        return f"Multiple matches found for {field_path}. Did you mean one of: {joined}?"
    text = f"Please choose a value for {field_path}"
    if note:
        text += f" ({note})"
    return f"{text}. Options: {joined}"


class _CountingLLM:
    """Counts completions so the per-query call budget is observable."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def complete(self, request: CompletionRequest):
        self.calls += 1
        return self.inner.complete(request)


class SessionEngine:
    """Single conversation. Not thread-safe on its own; the store
    serializes operations per session."""

    def __init__(
        self,
        session_id: str,
        vocab: GlobalVocabulary,
        kb: KnowledgeBase,
        prompts: PromptPack,
        llm,
        matcher,
        dashboard=None,
    ):
        self.session_id = session_id
        self.vocab = vocab
        self.kb = kb
        self.prompts = prompts
        self.llm = llm
        self.matcher = matcher
        self.dashboard = dashboard
        self.phase = AWAITING_QUERY
        self.query: str | None = None
        self.draft: ExtractionResult | None = None
        self.pending: list[ClarificationRequest] = []
        self.transcript: list[tuple[str, str]] = []
        self.time_range_minutes = DEFAULT_TIME_RANGE_MINUTES
        self.widget: WidgetSpec | None = None
        self.dashboard_widget_id: str | None = None
        self.error: str | None = None
        self.llm_calls_last_query = 0
        self._outcomes: dict[str, MatchOutcome] = {}
        self._answered: set[str] = set()
        self._request_ids: dict[str, str] = {}
        self._issued_prompts: dict[str, str] = {}
        self._id_counter = 0

    # -- operations ------------------------------------------------------

    def submit_query(self, query: str) -> None:
        if self.phase not in (AWAITING_QUERY, PREVIEWABLE):
            raise PhaseError(expected=f"{AWAITING_QUERY} or {PREVIEWABLE}", actual=self.phase)
        if not query or not query.strip():
            raise FieldValidationError("query", query, "query must be non-empty")
        self.phase = PARSING
        self.query = query
        self.draft = None
        self.pending = []
        self._outcomes = {}
        self._answered = set()
        self._request_ids = {}
        self._issued_prompts = {}
        self.widget = None
        self.error = None
        self.transcript.append(("user", query))

        counting = _CountingLLM(self.llm)
        try:
            widget_type = infer_widget_type(query, self.prompts, counting)
            raw = extract_data_sources(query, widget_type, self.prompts, counting, self.vocab)
        except ParseError as exc:
            self.llm_calls_last_query = counting.calls
            self._fail(f"model output could not be parsed: {exc}", raw_text=exc.raw_text)
            return
        except FieldValidationError as exc:
            self.llm_calls_last_query = counting.calls
            self._fail(f"model output failed validation: {exc}")
            return
        self.llm_calls_last_query = counting.calls

        draft, outcomes = resolve_extraction(raw, self.kb, self.matcher)
        self.draft = draft
        self._outcomes = {o.field_path: o for o in outcomes}
        self._advance()

    def answer_clarification(self, request_id: str, choice: str) -> None:
        if self.phase != CLARIFYING:
            raise PhaseError(expected=CLARIFYING, actual=self.phase)
        head = self.pending[0]
        if request_id != head.id:
            raise OrderingError(
                f"request {request_id} is not at the head of the queue (expected {head.id})"
            )
        if choice not in head.options:
            raise InvalidChoiceError(choice, head.options)
        self.transcript.append(("user", choice))
        self._apply_choice(head.field_path, choice)
        self._answered.add(head.field_path)
        self._advance()

    def set_time_range(self, minutes: int) -> None:
        if self.phase in (CONFIRMED, FAILED):
            raise PhaseError(expected="any unfinished phase", actual=self.phase)
        if not isinstance(minutes, int) or isinstance(minutes, bool) or minutes <= 0:
            raise FieldValidationError(
                "time_range", minutes, "time range must be a positive whole number of minutes"
            )
        self.time_range_minutes = minutes

    def preview_spec(self) -> WidgetSpec:
        if self.phase != PREVIEWABLE:
            raise PhaseError(expected=PREVIEWABLE, actual=self.phase)
        return build_widget_spec(self.draft, self.time_range_minutes, self.vocab)

    def confirm(self) -> WidgetSpec:
        if self.phase != PREVIEWABLE:
            raise PhaseError(expected=PREVIEWABLE, actual=self.phase)
        spec = build_widget_spec(self.draft, self.time_range_minutes, self.vocab)
        if self.dashboard is not None:
            self.dashboard_widget_id = self.dashboard.add(spec)
        else:
            self.dashboard_widget_id = spec.widget_id
        self.widget = spec
        self.phase = CONFIRMED
        self.transcript.append(("system", "widget confirmed"))
        return spec

    # -- internals -------------------------------------------------------

    def _fail(self, message: str, raw_text: str = "") -> None:
        if raw_text:
            self.transcript.append(("assistant", raw_text))
        self.transcript.append(("system", f"parse failed: {message}"))
        self.error = message
        self.phase = FAILED

    def _apply_choice(self, field_path: str, choice: str) -> None:
        draft = self.draft
        if field_path == "widget_type":
            draft.widget_type = choice
            if choice == "topList" and draft.grouping is None:
                draft.grouping = GroupingSpec()
            if choice not in GROUPABLE_TYPES and choice != "slo2" and draft.grouping is not None:
                log.info("dropping grouping: not applicable to widget type %s", choice)
                draft.grouping = None
        elif field_path == "metric":
            draft.metric = choice
            if draft.aggregation is not None and draft.aggregation not in self.vocab.aggregations_for(choice):
                log.info(
                    "aggregation %s invalid for chosen metric %s; asking again",
                    draft.aggregation,
                    choice,
                )
                draft.aggregation = None
                self._answered.discard("aggregation")
        elif field_path == "aggregation":
            draft.aggregation = choice
        elif field_path.startswith("filter."):
            draft.filter[field_path.split(".", 1)[1]] = choice
        elif field_path == "grouping.group_by_tag":
            self._ensure_grouping()
            draft.grouping = GroupingSpec(
                group_by_tag=choice,
                direction=draft.grouping.direction,
                max_results=draft.grouping.max_results,
            )
        elif field_path == "grouping.direction":
            self._ensure_grouping()
            draft.grouping = GroupingSpec(
                group_by_tag=draft.grouping.group_by_tag,
                direction=choice,
                max_results=draft.grouping.max_results,
            )
        elif field_path == "grouping.max_results":
            self._ensure_grouping()
            draft.grouping = GroupingSpec(
                group_by_tag=draft.grouping.group_by_tag,
                direction=draft.grouping.direction,
                max_results=int(choice),
            )
        elif field_path == "slo_name":
            draft.slo_name = choice
        else:
            raise FieldValidationError(field_path, choice, "unknown clarification field")

    def _ensure_grouping(self) -> None:
        if self.draft.grouping is None:
            self.draft.grouping = GroupingSpec()

    def _advance(self) -> None:
        """Recompute the clarification queue from the draft, then settle
        the phase. Runs after every mutation; previewable invariants are
        machine-checked before the phase flips."""
        self.pending = self._build_queue()
        for request in self.pending:
            previous = self._issued_prompts.get(request.id)
            if previous != request.prompt_text:
                self.transcript.append(("assistant", request.prompt_text))
                self._issued_prompts[request.id] = request.prompt_text
        if self.pending:
            self.phase = CLARIFYING
            return
        violations = check_previewable(self.draft, self.vocab)
        if violations:
            raise ContractError(violations)
        if self.phase != PREVIEWABLE:
            self.transcript.append(("system", "widget preview ready"))
        self.phase = PREVIEWABLE

    def _request_id_for(self, field_path: str) -> str:
        existing = self._request_ids.get(field_path)
        if existing is not None:
            return existing
        self._id_counter += 1
        request_id = f"{self.session_id}:{self._id_counter}"
        self._request_ids[field_path] = request_id
        return request_id

    def _make_request(
        self, kind: str, field_path: str, options: tuple[str, ...], note: str = ""
    ) -> ClarificationRequest:
        return ClarificationRequest(
            id=self._request_id_for(field_path),
            kind=kind,
            field_path=field_path,
            options=options,
            prompt_text=_prompt_for(kind, field_path, options, note),
        )

    def _missing_request(self, field_path: str) -> ClarificationRequest:
        opts = completion_options(field_path, self.draft, self.vocab, self.kb.catalog)
        return self._make_request(
            MISSING_ELEMENT, field_path, tuple(opts.allowed_values), opts.context_note
        )

    def _build_queue(self) -> list[ClarificationRequest]:
        draft = self.draft
        queue: list[ClarificationRequest] = []

        if draft.widget_type is None:
            # Every other field's relevance depends on the widget type, so
            # it is asked alone; the queue is recomputed once answered.
            return [self._missing_request("widget_type")]

        is_slo = draft.widget_type == "slo2"

        if not is_slo:
            if draft.metric is None:
                queue.append(self._missing_request("metric"))
            aggregation_invalid = (
                draft.aggregation is not None
                and draft.metric is not None
                and draft.aggregation not in self.vocab.aggregations_for(draft.metric)
            )
            if draft.aggregation is None or aggregation_invalid:
                if aggregation_invalid:
                    draft.aggregation = None
                queue.append(self._missing_request("aggregation"))

        if not is_slo:
            for key in sorted(draft.filter):
                field_path = f"filter.{key}"
                if field_path in self._answered:
                    continue
                outcome = self._outcomes.get(field_path)
                if outcome is None:
                    continue
                if outcome.status == AMBIGUOUS:
                    names = tuple(name for name, _ in outcome.candidates)
                    queue.append(self._make_request(DISAMBIGUATION, field_path, names))
                elif outcome.status == UNRESOLVABLE:
                    queue.append(self._missing_request(field_path))

        if draft.widget_type == "topList":
            self._ensure_grouping()
            for attr, field_path in _GROUPING_FIELDS:
                if getattr(draft.grouping, attr) is None:
                    queue.append(self._missing_request(field_path))

        if is_slo:
            outcome = self._outcomes.get("slo_name")
            unsettled = (
                "slo_name" not in self._answered
                and outcome is not None
                and outcome.status in (AMBIGUOUS, UNRESOLVABLE)
            )
            if draft.slo_name is None or unsettled:
                if unsettled and outcome.status == AMBIGUOUS:
                    names = tuple(name for name, _ in outcome.candidates)
                    queue.append(self._make_request(DISAMBIGUATION, "slo_name", names))
                else:
                    queue.append(self._missing_request("slo_name"))
        return queue

    # -- snapshot ----------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "phase": self.phase,
            "query": self.query,
            "time_range_minutes": self.time_range_minutes,
            "pending": [
                {
                    "id": r.id,
                    "kind": r.kind,
                    "field_path": r.field_path,
                    "options": list(r.options),
                    "prompt_text": r.prompt_text,
                }
                for r in self.pending
            ],
            "transcript": [list(pair) for pair in self.transcript],
            "error": self.error,
        }


class SessionStore:
    """Thread-safe registry of sessions with per-session write locks,
    a capacity cap, and idle expiry."""

    def __init__(self, capacity: int = 256, idle_seconds: float = SESSION_IDLE_SECONDS):
        self.capacity = capacity
        self.idle_seconds = idle_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionEngine] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._last_used: dict[str, float] = {}

    def _sweep(self, now: float) -> None:
        expired = [
            sid for sid, used in self._last_used.items() if now - used > self.idle_seconds
        ]
        for sid in expired:
            del self._sessions[sid]
            del self._locks[sid]
            del self._last_used[sid]
            log.info("session %s expired after idle timeout", sid)

    def create(self, factory, session_id: str | None = None) -> SessionEngine:
        now = time.time()
        with self._lock:
            self._sweep(now)
            if len(self._sessions) >= self.capacity:
                raise StoreCapacityError(f"session store is full ({self.capacity} sessions)")
            sid = session_id or uuid.uuid4().hex
            if sid in self._sessions:
                raise FieldValidationError("session_id", sid, "session id already exists")
            engine = factory(sid)
            self._sessions[sid] = engine
            self._locks[sid] = threading.Lock()
            self._last_used[sid] = now
            return engine

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._lock:
            self._sweep(time.time())
            if session_id not in self._sessions:
                raise KeyError(session_id)
            return self._locks[session_id]

    def get(self, session_id: str) -> SessionEngine:
        now = time.time()
        with self._lock:
            self._sweep(now)
            engine = self._sessions.get(session_id)
            if engine is None:
                raise KeyError(session_id)
            self._last_used[session_id] = now
            return engine

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)
