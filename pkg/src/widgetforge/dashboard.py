"""Single-dashboard widget store with optional JSON persistence.

The whole dashboard is one JSON document; when a path is configured the
document is rewritten atomically on every mutation so widgets survive a
process restart.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from pathlib import Path

from .widgets import WidgetSpec, deserialize_widget, serialize_widget

log = logging.getLogger(__name__)


class DashboardStore:
    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._entries: list[tuple[str, WidgetSpec]] = []
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        doc = json.loads(self.path.read_text("utf-8"))
        for entry in doc["widgets"]:
            spec = deserialize_widget(json.dumps(entry["widget"]))
            spec.created_at = entry.get("created_at", spec.created_at)
            self._entries.append((entry["id"], spec))

    def _persist(self) -> None:
        if self.path is None:
            return
        doc = {
            "widgets": [
                {
                    "id": widget_id,
                    "created_at": spec.created_at,
                    "widget": spec.to_canonical_dict(),
                }
                for widget_id, spec in self._entries
            ]
        }
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
        tmp.replace(self.path)

    def add(self, spec: WidgetSpec) -> str:
        """Store a widget; returns its dashboard id. Content-addressed ids
        collide when the same widget is added twice, so a numeric suffix
        keeps ids unique within the dashboard."""
        with self._lock:
            base = spec.widget_id
            existing = {widget_id for widget_id, _ in self._entries}
            widget_id = base
            suffix = 2
            while widget_id in existing:
                widget_id = f"{base}-{suffix}"
                suffix += 1
            self._entries.append((widget_id, spec))
            self._persist()
            return widget_id

    def remove(self, widget_id: str) -> bool:
        with self._lock:
            before = len(self._entries)
            self._entries = [(wid, spec) for wid, spec in self._entries if wid != widget_id]
            changed = len(self._entries) != before
            if changed:
                self._persist()
            return changed

    def widgets(self) -> list[tuple[str, WidgetSpec]]:
        with self._lock:
            return list(self._entries)

    def to_json_payload(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "id": widget_id,
                    "created_at": spec.created_at,
                    "widget": json.loads(serialize_widget(spec)),
                }
                for widget_id, spec in self._entries
            ]

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
