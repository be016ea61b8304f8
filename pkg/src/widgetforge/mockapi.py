"""Fixture-backed mock of the monitoring platform's REST API.

Serves the four entity-catalog endpoints and a metric-data endpoint that
generates deterministic synthetic series: the seed is a hash of the full
request parameters, so identical requests always produce identical data.
Per-endpoint artificial latency and failure injection support the
catalog-refresh timing and partial-failure tests.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import ConfigurationError

log = logging.getLogger(__name__)

FIXTURE_NAMES = ("services", "applications", "endpoints", "slo-configs")

SERIES_POINTS = 30

# Plausible value ranges per metric so previews look sane.
_VALUE_RANGES = {
    "latency": (40.0, 900.0),
    "calls": (0.0, 500.0),
    "erroneousCalls": (0.0, 50.0),
    "errors": (0.0, 1.0),
}
_DEFAULT_RANGE = (0.0, 100.0)

_GROUP_FIXTURES = {
    "service.name": "services",
    "application.name": "applications",
    "endpoint.name": "endpoints",
}


def _normalize_entries(raw) -> list[dict]:
    entries = []
    for item in raw:
        if isinstance(item, str):
            entries.append({"name": item})
        elif isinstance(item, dict) and item.get("name"):
            entries.append(item)
    return entries


def load_fixtures(source) -> dict[str, list[dict]]:
    """Accepts a fixtures directory (one <name>.json array per entity
    endpoint) or an in-memory mapping. A missing fixture is a startup
    error, not a 404 at request time."""
    fixtures: dict[str, list[dict]] = {}
    if isinstance(source, dict):
        for name in FIXTURE_NAMES:
            if name not in source:
                raise ConfigurationError(name, f"fixture {name} is missing")
            fixtures[name] = _normalize_entries(source[name])
        return fixtures
    root = Path(source)
    for name in FIXTURE_NAMES:
        path = root / f"{name}.json"
        if not path.exists():
            raise ConfigurationError(name, f"fixture file {path} is missing")
        fixtures[name] = _normalize_entries(json.loads(path.read_text("utf-8")))
    return fixtures


def _request_seed(params: dict[str, str]) -> int:
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return int(hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16], 16)


def synth_metric_data(params: dict[str, str]) -> dict:
    """Deterministic synthetic metric data for a request parameter set."""
    rng = random.Random(_request_seed(params))
    metric = params.get("metric", "")
    lo, hi = _VALUE_RANGES.get(metric, _DEFAULT_RANGE)
    try:
        window_ms = int(params.get("window", "3600000"))
    except ValueError:
        window_ms = 3_600_000
    step = max(window_ms // SERIES_POINTS, 1)
    points = [[i * step, round(rng.uniform(lo, hi), 3)] for i in range(SERIES_POINTS)]
    values = [p[1] for p in points]
    if params.get("aggregation") == "SUM":
        value = round(sum(values), 3)
    else:
        value = round(sum(values) / len(values), 3)
    body: dict = {"points": points, "value": value}

    group_by = params.get("groupBy")
    if group_by:
        try:
            limit = int(params.get("limit", "5"))
        except ValueError:
            limit = 5
        group_rng = random.Random(_request_seed({**params, "section": "groups"}))
        names = [f"{group_by.split('.')[0]}-{i + 1}" for i in range(max(limit, 1))]
        groups = [{"name": name, "value": round(group_rng.uniform(lo, hi), 3)} for name in names]
        reverse = params.get("order", "DESC").upper() != "ASC"
        groups.sort(key=lambda g: g["value"], reverse=reverse)
        body["groups"] = groups
    return body


class MockMonitoringServer:
    """In-process HTTP server; use as a context manager or call start/stop."""

    def __init__(
        self,
        fixtures,
        port: int = 0,
        auth_token: str | None = None,
        latency_ms: int | dict[str, int] = 0,
        fail_endpoints: tuple[str, ...] = (),
    ):
        self.fixtures = load_fixtures(fixtures)
        self.port = port
        self.auth_token = auth_token
        self.latency_ms = latency_ms
        self.fail_endpoints = set(fail_endpoints)
        self.request_log: list[str] = []
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None
        self._group_names = {
            tag: sorted(e["name"] for e in self.fixtures[fixture])
            for tag, fixture in _GROUP_FIXTURES.items()
        }

    # endpoint name → latency to apply
    def _latency_for(self, endpoint: str) -> float:
        if isinstance(self.latency_ms, dict):
            return self.latency_ms.get(endpoint, 0) / 1000.0
        return self.latency_ms / 1000.0

    @property
    def base_url(self) -> str:
        if self._httpd is None:
            raise RuntimeError("server is not running")
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockMonitoringServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                log.debug("mock api: " + fmt, *args)

            def _reply(self, code: int, body) -> None:
                data = json.dumps(body).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                parsed = urlparse(self.path)
                segments = parsed.path.strip("/").split("/")
                if len(segments) != 2 or segments[0] != "api":
                    self._reply(404, {"error": "unknown path"})
                    return
                endpoint = segments[1]
                outer.request_log.append(endpoint)
                if outer.auth_token is not None:
                    header = self.headers.get("Authorization", "")
                    if header != f"Bearer {outer.auth_token}":
                        self._reply(401, {"error": "missing or invalid token"})
                        return
                delay = outer._latency_for(endpoint)
                if delay > 0:
                    time.sleep(delay)
                if endpoint in outer.fail_endpoints:
                    self._reply(500, {"error": f"{endpoint} is down"})
                    return
                if endpoint in FIXTURE_NAMES:
                    self._reply(200, outer.fixtures[endpoint])
                    return
                if endpoint == "metric-data":
                    params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                    body = synth_metric_data(params)
                    group_by = params.get("groupBy")
                    if group_by in outer._group_names and body.get("groups"):
                        # Prefer real entity names from fixtures for grouped
                        # previews; synthetic names pad past the fixture count.
                        names = outer._group_names[group_by]
                        for i, group in enumerate(body["groups"]):
                            if i < len(names):
                                group["name"] = names[i]
                    self._reply(200, body)
                    return
                self._reply(404, {"error": f"unknown endpoint {endpoint}"})

        self._httpd = ThreadingHTTPServer(("127.0.0.1", self.port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockMonitoringServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def mock_monitoring_server(fixtures, **kwargs) -> MockMonitoringServer:
    """Start and return a running mock monitoring server."""
    return MockMonitoringServer(fixtures, **kwargs).start()
