from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import SERVICES
from test_session import CLARIFY_BODY, CLARIFY_QUERY, COMPLETE_BODY, COMPLETE_QUERY, seed
from widgetforge.catalog import KnowledgeBase
from widgetforge.dashboard import DashboardStore
from widgetforge.llm import ReplayLLMClient
from widgetforge.mockapi import MockMonitoringServer
from widgetforge.prompts import REPROMPT_INSTRUCTION
from widgetforge.resolver import TrigramSimilarity
from widgetforge.server import create_app
from widgetforge.session import SessionStore


@pytest.fixture
def replay(prompts):
    client = ReplayLLMClient()
    seed(client, prompts, COMPLETE_QUERY, "TIME_SERIES", COMPLETE_BODY)
    seed(client, prompts, CLARIFY_QUERY, "TIME_SERIES", CLARIFY_BODY)
    return client


def make_client(vocab, kb, prompts, replay, **kwargs) -> TestClient:
    app = create_app(
        vocab=vocab,
        kb=kb,
        prompts=prompts,
        llm=replay,
        matcher=TrigramSimilarity(threshold=0.6),
        session_store=kwargs.pop("session_store", SessionStore()),
        dashboard=kwargs.pop("dashboard", DashboardStore()),
        **kwargs,
    )
    return TestClient(app)


@pytest.fixture
def client(vocab, kb, prompts, replay):
    return make_client(vocab, kb, prompts, replay)


def _create_session(client) -> str:
    resp = client.post("/api/sessions")
    assert resp.status_code == 201
    doc = resp.json()
    assert doc["status"] == "ok"
    return doc["payload"]["session_id"]


def test_create_session_envelope(client):
    resp = client.post("/api/sessions")
    assert resp.status_code == 201
    doc = resp.json()
    assert set(doc) == {"status", "payload", "session_id"}
    assert doc["status"] == "ok"
    assert doc["payload"]["phase"] == "awaiting_query"
    assert doc["session_id"] == doc["payload"]["session_id"]


def test_store_capacity_503(vocab, kb, prompts, replay):
    client = make_client(vocab, kb, prompts, replay, session_store=SessionStore(capacity=1))
    _create_session(client)
    resp = client.post("/api/sessions")
    assert resp.status_code == 503
    doc = resp.json()
    assert doc["status"] == "error"
    assert doc["payload"]["code"] == "store_full"


def test_complete_query_message(client):
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["status"] == "ok"
    assert doc["payload"]["phase"] == "previewable"
    assert doc["payload"]["preview_ready"] is True


def test_clarification_envelope_and_flow(client):
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"query": CLARIFY_QUERY})
    doc = resp.json()
    assert doc["status"] == "clarification_needed"
    clarifications = doc["payload"]["clarifications"]
    assert [c["field_path"] for c in clarifications] == ["aggregation", "filter.service.name"]

    first = clarifications[0]
    resp = client.post(
        f"/api/sessions/{session_id}/messages",
        json={"answer": {"request_id": first["id"], "choice": "MEAN"}},
    )
    doc = resp.json()
    assert doc["status"] == "clarification_needed"
    [remaining] = doc["payload"]["clarifications"]
    assert remaining["field_path"] == "filter.service.name"
    assert remaining["options"] == ["appdata-reader", "appdata-writer"]

    resp = client.post(
        f"/api/sessions/{session_id}/messages",
        json={"answer": {"request_id": remaining["id"], "choice": "appdata-writer"}},
    )
    assert resp.json()["payload"]["phase"] == "previewable"


def test_answer_out_of_order_409(client):
    session_id = _create_session(client)
    doc = client.post(f"/api/sessions/{session_id}/messages", json={"query": CLARIFY_QUERY}).json()
    second = doc["payload"]["clarifications"][1]
    resp = client.post(
        f"/api/sessions/{session_id}/messages",
        json={"answer": {"request_id": second["id"], "choice": "appdata-writer"}},
    )
    assert resp.status_code == 409
    assert resp.json()["payload"]["code"] == "ordering_error"


def test_invalid_choice_422(client):
    session_id = _create_session(client)
    doc = client.post(f"/api/sessions/{session_id}/messages", json={"query": CLARIFY_QUERY}).json()
    first = doc["payload"]["clarifications"][0]
    resp = client.post(
        f"/api/sessions/{session_id}/messages",
        json={"answer": {"request_id": first["id"], "choice": "BOGUS"}},
    )
    assert resp.status_code == 422
    assert resp.json()["payload"]["code"] == "invalid_choice"


def test_malformed_answer_422(client):
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": CLARIFY_QUERY})
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"answer": {"choice": "MEAN"}})
    assert resp.status_code == 422
    assert resp.json()["payload"]["code"] == "invalid_field"


def test_unrecognized_message_422(client):
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"nonsense": 1})
    assert resp.status_code == 422
    assert resp.json()["payload"]["code"] == "invalid_field"


def test_unknown_session_404(client):
    for method, path in (
        ("post", "/api/sessions/ghost/messages"),
        ("get", "/api/sessions/ghost/preview"),
        ("post", "/api/sessions/ghost/confirm"),
    ):
        resp = getattr(client, method)(path, **({"json": {"query": "x"}} if method == "post" and path.endswith("messages") else {}))
        assert resp.status_code == 404, path
        assert resp.json()["payload"]["code"] == "unknown_session"


def test_query_while_clarifying_409(client):
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": CLARIFY_QUERY})
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    assert resp.status_code == 409
    assert resp.json()["payload"]["code"] == "phase_error"


def test_time_range_message(client):
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"time_range": 30})
    assert resp.status_code == 200
    assert resp.json()["payload"]["time_range_minutes"] == 30
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"time_range": 0})
    assert resp.status_code == 422


def test_preview_before_ready_409(client):
    session_id = _create_session(client)
    resp = client.get(f"/api/sessions/{session_id}/preview")
    assert resp.status_code == 409
    assert resp.json()["payload"]["code"] == "phase_error"


def test_preview_without_data_api_warns(client):
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    resp = client.get(f"/api/sessions/{session_id}/preview")
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["status"] == "ok"
    assert doc["payload"]["data"] is None
    assert "warning" in doc["payload"]
    widget = doc["payload"]["widget"]
    assert list(widget) == ["type", "title", "config", "time_range"]


def test_preview_with_mock_data(vocab, kb, prompts, replay, mock_fixtures):
    with MockMonitoringServer(mock_fixtures) as server:
        client = make_client(vocab, kb, prompts, replay, data_api_url=server.base_url)
        session_id = _create_session(client)
        client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
        resp = client.get(f"/api/sessions/{session_id}/preview")
    doc = resp.json()
    assert doc["status"] == "ok"
    assert "warning" not in doc["payload"]
    assert len(doc["payload"]["data"]["points"]) == 30


def test_preview_with_token_protected_data_api(vocab, kb, prompts, replay, mock_fixtures):
    with MockMonitoringServer(mock_fixtures, auth_token="sekrit") as server:
        client = make_client(
            vocab, kb, prompts, replay, data_api_url=server.base_url, data_api_token="sekrit"
        )
        session_id = _create_session(client)
        client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
        resp = client.get(f"/api/sessions/{session_id}/preview")
    doc = resp.json()
    assert "warning" not in doc["payload"]
    assert len(doc["payload"]["data"]["points"]) == 30


def test_preview_with_dead_data_api_warns_not_fails(vocab, kb, prompts, replay):
    client = make_client(vocab, kb, prompts, replay, data_api_url="http://127.0.0.1:9")
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    resp = client.get(f"/api/sessions/{session_id}/preview")
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["status"] == "ok"
    assert doc["payload"]["data"] is None
    assert "unreachable" in doc["payload"]["warning"]


def test_confirm_places_widget_on_dashboard(vocab, kb, prompts, replay):
    dashboard = DashboardStore()
    client = make_client(vocab, kb, prompts, replay, dashboard=dashboard)
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    resp = client.post(f"/api/sessions/{session_id}/confirm")
    assert resp.status_code == 200
    widget_id = resp.json()["payload"]["widget_id"]

    listing = client.get("/api/dashboard").json()
    assert listing["status"] == "ok"
    ids = [w["id"] for w in listing["payload"]["widgets"]]
    assert widget_id in ids
    assert len(dashboard) == 1


def test_confirm_twice_409(client):
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": COMPLETE_QUERY})
    assert client.post(f"/api/sessions/{session_id}/confirm").status_code == 200
    resp = client.post(f"/api/sessions/{session_id}/confirm")
    assert resp.status_code == 409
    assert resp.json()["payload"]["code"] == "phase_error"


def test_parse_failure_is_http_200_error_envelope(vocab, kb, prompts):
    replay = ReplayLLMClient()
    query = "unparseable"
    s1, u1 = prompts.messages_for_widget_type(query)
    replay.add(s1, u1, "pie")
    s2, u2 = prompts.messages_for_datasource("pie", query)
    replay.add(s2, u2, "junk")
    replay.add(s2, f"{u2}\n{REPROMPT_INSTRUCTION}", "more junk")
    client = make_client(vocab, kb, prompts, replay)
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"query": query})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["status"] == "error"
    assert doc["payload"]["code"] == "parse_failed"
    assert doc["payload"]["phase"] == "failed"


def test_unseeded_query_503_llm_unavailable(client):
    session_id = _create_session(client)
    resp = client.post(f"/api/sessions/{session_id}/messages", json={"query": "never recorded"})
    assert resp.status_code == 503
    assert resp.json()["payload"]["code"] == "llm_unavailable"


def test_kb_refresh_unconfigured_notice(client):
    resp = client.post("/api/kb/refresh")
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["status"] == "ok"
    assert doc["payload"]["refreshed"] is False
    assert "retained" in doc["payload"]["notice"]
    # The seeded snapshot is still there.
    assert doc["payload"]["fetched_at"] is not None


def test_kb_refresh_with_live_mock(vocab, prompts, replay, mock_fixtures):
    with MockMonitoringServer(mock_fixtures, auth_token="tok") as server:
        kb = KnowledgeBase(vocab, api_base=server.base_url, auth_token="tok")
        client = make_client(vocab, kb, prompts, replay)
        resp = client.post("/api/kb/refresh")
        doc = resp.json()
        assert doc["payload"]["refreshed"] is True
        assert doc["payload"]["fetched_at"] is not None
        assert "notice" not in doc["payload"]
        assert kb.domain("services") == frozenset(SERVICES)


def test_sessions_are_isolated(client):
    a = _create_session(client)
    b = _create_session(client)
    client.post(f"/api/sessions/{a}/messages", json={"query": CLARIFY_QUERY})
    doc_b = client.post(f"/api/sessions/{b}/messages", json={"query": COMPLETE_QUERY}).json()
    assert doc_b["payload"]["phase"] == "previewable"
    # Session a is still waiting on its first clarification.
    doc_a = client.post(
        f"/api/sessions/{a}/messages",
        json={"answer": {"request_id": f"{a}:1", "choice": "MEAN"}},
    ).json()
    assert doc_a["status"] == "clarification_needed"


def test_slo_preview_has_no_data_fetch(vocab, kb, prompts):
    replay = ReplayLLMClient()
    query = "slo widget for great expectations"
    seed(replay, prompts, query, "slo2", json.dumps({"name": "Great Expectations"}))
    client = make_client(vocab, kb, prompts, replay, data_api_url="http://127.0.0.1:9")
    session_id = _create_session(client)
    client.post(f"/api/sessions/{session_id}/messages", json={"query": query})
    resp = client.get(f"/api/sessions/{session_id}/preview")
    doc = resp.json()
    assert doc["status"] == "ok"
    assert doc["payload"]["data"] is None
    assert "warning" not in doc["payload"]
    assert doc["payload"]["widget"]["config"] == {"name": "Great Expectations"}
