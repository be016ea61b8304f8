"""HTTP surface for the widget-generation service.

Every response is an envelope {status, payload, session_id} where status
is ok, clarification_needed, or error; clarification_needed responses
always carry at least one clarification request. Error payloads carry a
machine code plus human-readable text.
"""

from __future__ import annotations

import json
import logging
import os

import requests
from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from .catalog import KnowledgeBase
from .dashboard import DashboardStore
from .errors import (
    ContractError,
    DomainUnavailableError,
    FieldValidationError,
    InvalidChoiceError,
    NoOptionsError,
    OrderingError,
    PhaseError,
    StoreCapacityError,
    TransportError,
)
from .llm import HttpLLMClient, ReplayLLMClient
from .prompts import build_prompts
from .resolver import EmbeddingSimilarity, TrigramSimilarity
from .session import CLARIFYING, FAILED, SessionEngine, SessionStore
from .vocabulary import load_global_vocabulary
from .widgets import data_request_params, serialize_widget

log = logging.getLogger(__name__)

PREVIEW_DATA_TIMEOUT = 5.0

_ERROR_MAP = [
    (StoreCapacityError, 503, "store_full"),
    (DomainUnavailableError, 503, "catalog_unavailable"),
    (TransportError, 503, "llm_unavailable"),
    (PhaseError, 409, "phase_error"),
    (OrderingError, 409, "ordering_error"),
    (ContractError, 409, "contract_violation"),
    (InvalidChoiceError, 422, "invalid_choice"),
    (FieldValidationError, 422, "invalid_field"),
    (NoOptionsError, 422, "no_options"),
]


def _envelope(status: str, payload, session_id: str | None = None) -> dict:
    return {"status": status, "payload": payload, "session_id": session_id}


def _error_response(exc: Exception, session_id: str | None = None) -> JSONResponse:
    if isinstance(exc, KeyError):
        return JSONResponse(
            status_code=404,
            content=_envelope(
                "error", {"code": "unknown_session", "message": f"no session {exc.args[0]}"}, session_id
            ),
        )
    for exc_type, http_status, code in _ERROR_MAP:
        if isinstance(exc, exc_type):
            return JSONResponse(
                status_code=http_status,
                content=_envelope("error", {"code": code, "message": str(exc)}, session_id),
            )
    raise exc


def _session_view(engine: SessionEngine) -> dict:
    view = {"phase": engine.phase, "time_range_minutes": engine.time_range_minutes}
    if engine.phase == CLARIFYING:
        view["clarifications"] = [
            {
                "id": r.id,
                "kind": r.kind,
                "field_path": r.field_path,
                "options": list(r.options),
                "prompt_text": r.prompt_text,
            }
            for r in engine.pending
        ]
    if engine.phase == "previewable":
        view["preview_ready"] = True
    return view


def _session_envelope(engine: SessionEngine) -> JSONResponse:
    if engine.phase == FAILED:
        return JSONResponse(
            status_code=200,
            content=_envelope(
                "error",
                {"code": "parse_failed", "message": engine.error, "phase": FAILED},
                engine.session_id,
            ),
        )
    status = "clarification_needed" if engine.phase == CLARIFYING else "ok"
    return JSONResponse(
        status_code=200, content=_envelope(status, _session_view(engine), engine.session_id)
    )


def _fetch_preview_data(
    data_api_url: str | None, params: dict, auth_token: str | None = None
) -> tuple[dict | None, str | None]:
    if "slo_name" in params:
        return None, None
    if not data_api_url:
        return None, "preview data unavailable: no monitoring API configured"
    query = {
        "metric": params["metric"],
        "aggregation": params["aggregation"],
        "window": str(params["window_end_ms"] - params["window_start_ms"]),
        "filter": json.dumps(params["filter"], sort_keys=True, separators=(",", ":")),
    }
    for source_key, target_key in (("group_by", "groupBy"), ("order", "order"), ("limit", "limit")):
        if source_key in params:
            query[target_key] = str(params[source_key])
    headers = {"Authorization": f"Bearer {auth_token}"} if auth_token else {}
    try:
        response = requests.get(
            f"{data_api_url}/api/metric-data",
            params=query,
            headers=headers,
            timeout=PREVIEW_DATA_TIMEOUT,
        )
        response.raise_for_status()
        return response.json(), None
    except (requests.RequestException, ValueError) as exc:
        log.warning("preview data fetch failed: %s", exc)
        return None, "preview data unavailable: monitoring API unreachable"


def create_app(
    vocab=None,
    kb: KnowledgeBase | None = None,
    prompts=None,
    llm=None,
    matcher=None,
    session_store: SessionStore | None = None,
    dashboard: DashboardStore | None = None,
    data_api_url: str | None = None,
    data_api_token: str | None = None,
    few_shot: bool = True,
    threshold: float | None = None,
) -> FastAPI:
    vocab = vocab or load_global_vocabulary()
    prompts = prompts or build_prompts(vocab, few_shot=few_shot)
    if kb is None:
        kb = KnowledgeBase.from_env(vocab)
    if llm is None:
        llm = HttpLLMClient.from_env()
    if matcher is None:
        matcher = _matcher_from_env(threshold)
    store = session_store if session_store is not None else SessionStore()
    dash = dashboard if dashboard is not None else DashboardStore(os.environ.get("DASHBOARD_STORE_PATH"))

    app = FastAPI(title="widgetforge")
    app.state.vocab = vocab
    app.state.kb = kb
    app.state.prompts = prompts
    app.state.llm = llm
    app.state.matcher = matcher
    app.state.sessions = store
    app.state.dashboard = dash
    app.state.data_api_url = data_api_url
    app.state.data_api_token = data_api_token

    def engine_factory(session_id: str) -> SessionEngine:
        return SessionEngine(session_id, vocab, kb, prompts, llm, matcher, dashboard=dash)

    @app.post("/api/sessions", status_code=201)
    def create_session():
        try:
            engine = store.create(engine_factory)
        except Exception as exc:
            return _error_response(exc)
        return _envelope("ok", _session_view(engine) | {"session_id": engine.session_id}, engine.session_id)

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: dict = Body(...)):
        try:
            lock = store.lock_for(session_id)
            with lock:
                engine = store.get(session_id)
                if "query" in body:
                    engine.submit_query(body["query"])
                elif "answer" in body:
                    answer = body["answer"]
                    if not isinstance(answer, dict) or "request_id" not in answer or "choice" not in answer:
                        raise FieldValidationError(
                            "answer", answer, "answer must carry request_id and choice"
                        )
                    engine.answer_clarification(answer["request_id"], answer["choice"])
                elif "time_range" in body:
                    engine.set_time_range(body["time_range"])
                else:
                    raise FieldValidationError(
                        "body", body, "message must carry query, answer, or time_range"
                    )
                return _session_envelope(engine)
        except Exception as exc:
            return _error_response(exc, session_id)

    @app.get("/api/sessions/{session_id}/preview")
    def get_preview(session_id: str):
        try:
            lock = store.lock_for(session_id)
            with lock:
                engine = store.get(session_id)
                spec = engine.preview_spec()
                params = data_request_params(spec)
                data, warning = _fetch_preview_data(data_api_url, params, data_api_token)
                payload = {
                    "widget": json.loads(serialize_widget(spec)),
                    "widget_id": spec.widget_id,
                    "data": data,
                }
                if warning:
                    payload["warning"] = warning
                return _envelope("ok", payload, session_id)
        except Exception as exc:
            return _error_response(exc, session_id)

    @app.post("/api/sessions/{session_id}/confirm")
    def confirm(session_id: str):
        try:
            lock = store.lock_for(session_id)
            with lock:
                engine = store.get(session_id)
                spec = engine.confirm()
                payload = {
                    "widget_id": engine.dashboard_widget_id,
                    "widget": json.loads(serialize_widget(spec)),
                }
                return _envelope("ok", payload, session_id)
        except Exception as exc:
            return _error_response(exc, session_id)

    @app.get("/api/dashboard")
    def get_dashboard():
        return _envelope("ok", {"widgets": dash.to_json_payload()})

    @app.post("/api/kb/refresh")
    def refresh_kb():
        refreshed = kb.refresh()
        snapshot = kb.catalog
        payload: dict = {
            "refreshed": refreshed,
            "fetched_at": snapshot.fetched_at if snapshot is not None else None,
        }
        if not refreshed:
            payload["notice"] = "catalog fetch failed; previous snapshot retained"
        return _envelope("ok", payload)

    return app


def _matcher_from_env(threshold: float | None = None):
    kwargs = {} if threshold is None else {"threshold": threshold}
    embed_url = os.environ.get("EMBED_API_URL")
    if embed_url:
        return EmbeddingSimilarity(embed_url, **kwargs)
    return TrigramSimilarity(**kwargs)


def create_app_from_env(replay_file: str | None = None, few_shot: bool = True) -> FastAPI:
    """Build the app from environment configuration. A replay file swaps
    the live LLM for the recorded stub so the whole stack runs offline."""
    llm = ReplayLLMClient(replay_file) if replay_file else None
    return create_app(
        llm=llm,
        few_shot=few_shot,
        data_api_url=os.environ.get("MONITORING_API_URL"),
        data_api_token=os.environ.get("MONITORING_API_TOKEN"),
    )
