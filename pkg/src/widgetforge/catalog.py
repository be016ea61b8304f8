"""Runtime entity catalogs (Type II knowledge): concurrent fetch from the
monitoring API, atomic snapshot replacement, periodic refresh, and an
optional on-disk cache so restarts do not block on the API.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import requests

from .errors import AuthenticationError, CatalogFetchError, DomainUnavailableError
from .vocabulary import GlobalVocabulary

log = logging.getLogger(__name__)

DEFAULT_REFRESH_SECONDS = 300.0

# The four entity endpoints, fetched concurrently. Each returns a JSON
# array of objects carrying at least a "name" string field.
ENTITY_ENDPOINTS = (
    ("services", "/api/services"),
    ("applications", "/api/applications"),
    ("endpoints", "/api/endpoints"),
    ("slo_configs", "/api/slo-configs"),
)


@dataclass(frozen=True)
class EntityCatalog:
    services: frozenset[str]
    applications: frozenset[str]
    endpoints: frozenset[str]
    slo_configs: frozenset[str]
    fetched_at: float
    source_instance: str

    def domain(self, name: str) -> frozenset[str]:
        return getattr(self, name)

    def to_json_dict(self) -> dict:
        return {
            "services": sorted(self.services),
            "applications": sorted(self.applications),
            "endpoints": sorted(self.endpoints),
            "slo_configs": sorted(self.slo_configs),
            "fetched_at": self.fetched_at,
            "source_instance": self.source_instance,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "EntityCatalog":
        return cls(
            services=frozenset(doc["services"]),
            applications=frozenset(doc["applications"]),
            endpoints=frozenset(doc["endpoints"]),
            slo_configs=frozenset(doc["slo_configs"]),
            fetched_at=float(doc["fetched_at"]),
            source_instance=doc["source_instance"],
        )


def _fetch_one(session: requests.Session, base: str, path: str, token: str, timeout: float) -> frozenset[str]:
    resp = session.get(base.rstrip("/") + path, headers={"Authorization": f"Bearer {token}"}, timeout=timeout)
    if resp.status_code in (401, 403):
        raise AuthenticationError(f"monitoring API rejected the token on {path} (HTTP {resp.status_code})")
    resp.raise_for_status()
    names = set()
    for entry in resp.json():
        name = entry.get("name") if isinstance(entry, dict) else None
        if isinstance(name, str) and name:
            names.add(name)
    return frozenset(names)


def fetch_entity_catalog(
    api_base: str,
    auth_token: str,
    timeout: float = 10.0,
    session: requests.Session | None = None,
) -> EntityCatalog:
    """Fetch all four entity sets concurrently.

    Wall time tracks the slowest endpoint, not the sum. Any endpoint
    failure raises CatalogFetchError carrying a partial catalog built from
    the sets that did arrive; auth rejection raises immediately.
    """
    if not auth_token:
        raise AuthenticationError("auth token must be non-empty")
    own_session = session is None
    session = session or requests.Session()
    results: dict[str, frozenset[str]] = {}
    failures: dict[str, str] = {}
    try:
        with ThreadPoolExecutor(max_workers=len(ENTITY_ENDPOINTS)) as pool:
            futures = {
                name: pool.submit(_fetch_one, session, api_base, path, auth_token, timeout)
                for name, path in ENTITY_ENDPOINTS
            }
            for name, future in futures.items():
                try:
                    results[name] = future.result()
                except AuthenticationError:
                    raise
                except Exception as exc:
                    failures[name] = str(exc)
    finally:
        if own_session:
            session.close()

    catalog = EntityCatalog(
        services=results.get("services", frozenset()),
        applications=results.get("applications", frozenset()),
        endpoints=results.get("endpoints", frozenset()),
        slo_configs=results.get("slo_configs", frozenset()),
        fetched_at=time.time(),
        source_instance=api_base,
    )
    if failures:
        raise CatalogFetchError(sorted(failures), partial=catalog)
    return catalog


class KnowledgeBase:
    """Two-tier lookup store with snapshot isolation.

    The catalog reference is replaced atomically on refresh, so readers
    always observe all four entity sets from one fetch cycle. One
    background refresher thread may run; reads are safe from any thread.
    """

    def __init__(
        self,
        vocab: GlobalVocabulary,
        api_base: str | None = None,
        auth_token: str | None = None,
        refresh_interval: float = DEFAULT_REFRESH_SECONDS,
        cache_path: str | Path | None = None,
    ):
        self.vocab = vocab
        self.api_base = api_base
        self.auth_token = auth_token
        self.refresh_interval = refresh_interval
        self.cache_path = Path(cache_path) if cache_path else None
        self._catalog: EntityCatalog | None = None
        self._refresh_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        if self.cache_path and self.cache_path.exists():
            try:
                self._catalog = EntityCatalog.from_json_dict(json.loads(self.cache_path.read_text("utf-8")))
                log.info("catalog restored from cache: %s", self.cache_path)
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                log.warning("ignoring unreadable catalog cache %s: %s", self.cache_path, exc)

    @classmethod
    def from_env(cls, vocab: GlobalVocabulary, cache_path: str | Path | None = None) -> "KnowledgeBase":
        return cls(
            vocab,
            api_base=os.environ.get("MONITORING_API_URL"),
            auth_token=os.environ.get("MONITORING_API_TOKEN"),
            refresh_interval=float(os.environ.get("KB_REFRESH_SECONDS", DEFAULT_REFRESH_SECONDS)),
            cache_path=cache_path,
        )

    @classmethod
    def from_catalog(cls, vocab: GlobalVocabulary, catalog: EntityCatalog) -> "KnowledgeBase":
        kb = cls(vocab)
        kb._catalog = catalog
        return kb

    @property
    def catalog(self) -> EntityCatalog | None:
        return self._catalog

    def domain(self, name: str) -> frozenset[str]:
        catalog = self._catalog
        if catalog is None:
            raise DomainUnavailableError(name)
        return catalog.domain(name)

    def _install(self, new: EntityCatalog) -> None:
        old = self._catalog
        if old is not None and new.fetched_at <= old.fetched_at:
            new = replace(new, fetched_at=old.fetched_at + 1e-6)
        self._catalog = new
        if self.cache_path:
            try:
                self.cache_path.write_text(json.dumps(new.to_json_dict(), indent=2) + "\n", "utf-8")
            except OSError as exc:
                log.warning("could not persist catalog cache: %s", exc)

    def refresh(self) -> bool:
        """Fetch a fresh catalog and swap it in atomically.

        Returns True on a full or partial install. On partial failure the
        failed endpoints retain the previous snapshot's sets; on total
        failure the old snapshot stays untouched and False is returned.
        """
        if not self.api_base or not self.auth_token:
            log.warning("refresh skipped: monitoring API not configured")
            return False
        with self._refresh_lock:
            try:
                new = fetch_entity_catalog(self.api_base, self.auth_token)
            except CatalogFetchError as exc:
                old = self._catalog
                if exc.partial is None or len(exc.failed_endpoints) == len(ENTITY_ENDPOINTS):
                    log.error("catalog refresh failed entirely: %s", exc)
                    return False
                merged = exc.partial
                if old is not None:
                    # Failed endpoints keep the previous cycle's data.
                    kwargs = {
                        name: old.domain(name) if name in exc.failed_endpoints else merged.domain(name)
                        for name, _ in ENTITY_ENDPOINTS
                    }
                    merged = replace(merged, **kwargs)
                log.error("partial catalog refresh, stale sets retained for: %s", ", ".join(exc.failed_endpoints))
                self._install(merged)
                return True
            except AuthenticationError:
                raise
            except Exception as exc:
                log.error("catalog refresh failed: %s", exc)
                return False
            self._install(new)
            log.info(
                "catalog refreshed: %d services, %d applications, %d endpoints, %d SLO configs",
                len(new.services), len(new.applications), len(new.endpoints), len(new.slo_configs),
            )
            return True

    def start_refresher(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()

        def loop():
            while not self._stop.wait(self.refresh_interval):
                try:
                    self.refresh()
                except Exception as exc:
                    log.error("scheduled refresh raised: %s", exc)

        self._thread = threading.Thread(target=loop, name="kb-refresher", daemon=True)
        self._thread.start()

    def stop_refresher(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=5)
        self._thread = None
