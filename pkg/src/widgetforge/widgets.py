"""Widget JSON construction, canonical serialization, and schema validation.

The canonical document is {type, title, config, time_range} in that key
order, serialized with two-space indentation, UTF-8, LF. widget_id is a
content hash of the canonical form, so equal specs share an id and
byte-identical serialization; created_at is runtime metadata excluded
from both the document and equality.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .errors import ContractError, ParseError
from .parsing import ExtractionResult, GroupingSpec
from .vocabulary import GlobalVocabulary

DEFAULT_TIME_RANGE_MINUTES = 60

RENDERING_DEFAULTS = {
    "TIME_SERIES": {"chart": "line"},
    "pie": {"donut": False},
    "bigNumber": {"sparkline": False},
    "topList": {"chart": "bar"},
}

_schema_cache: dict | None = None
_validator_cache: jsonschema.Draft202012Validator | None = None


def widget_schema() -> dict:
    global _schema_cache
    if _schema_cache is None:
        text = resources.files("widgetforge").joinpath("schemas/widget.schema.json").read_text("utf-8")
        _schema_cache = json.loads(text)
    return _schema_cache


def _validator() -> jsonschema.Draft202012Validator:
    global _validator_cache
    if _validator_cache is None:
        _validator_cache = jsonschema.Draft202012Validator(widget_schema())
    return _validator_cache


@dataclass
class DataSource:
    metric: str
    aggregation: str
    tag_filter: dict[str, str]
    grouping: GroupingSpec | None = None
    label: str = ""

    def __post_init__(self):
        if not self.label:
            self.label = default_label(self.metric, self.aggregation, self.tag_filter)

    def to_dict(self) -> dict:
        doc: dict = {
            "metric": self.metric,
            "aggregation": self.aggregation,
            "filter": {k: self.tag_filter[k] for k in sorted(self.tag_filter)},
        }
        if self.grouping is not None and not self.grouping.is_empty():
            grouping: dict = {}
            if self.grouping.group_by_tag is not None:
                grouping["groupbyTag"] = self.grouping.group_by_tag
            if self.grouping.direction is not None:
                grouping["direction"] = self.grouping.direction
            if self.grouping.max_results is not None:
                grouping["maxResults"] = self.grouping.max_results
            doc["grouping"] = grouping
        doc["label"] = self.label
        return doc


def default_label(metric: str, aggregation: str, tag_filter: dict[str, str]) -> str:
    base = f"{aggregation}({metric})"
    if tag_filter:
        clauses = " and ".join(f'{k}="{tag_filter[k]}"' for k in sorted(tag_filter))
        return f"{base} where {clauses}"
    return base


@dataclass
class WidgetSpec:
    type: str
    title: str
    config: dict
    time_range_minutes: int
    created_at: float = field(default_factory=time.time, compare=False)

    @property
    def widget_id(self) -> str:
        import hashlib

        return hashlib.sha256(serialize_widget(self).encode("utf-8")).hexdigest()[:16]

    def to_canonical_dict(self) -> dict:
        return {
            "type": self.type,
            "title": self.title,
            "config": self.config,
            "time_range": {"last_minutes": self.time_range_minutes},
        }


def serialize_widget(spec: WidgetSpec) -> str:
    return json.dumps(spec.to_canonical_dict(), indent=2, ensure_ascii=False)


def deserialize_widget(text: str) -> WidgetSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid widget JSON: {exc}", raw_text=text) from exc
    try:
        return WidgetSpec(
            type=doc["type"],
            title=doc["title"],
            config=doc["config"],
            time_range_minutes=int(doc["time_range"]["last_minutes"]),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"widget JSON is missing required structure: {exc}", raw_text=text) from exc


def check_previewable(draft: ExtractionResult, vocab: GlobalVocabulary) -> list[str]:
    """Violations of the previewable contract; empty when buildable."""
    violations: list[str] = []
    if draft.widget_type is None:
        violations.append("widget_type is Null")
        return violations
    if draft.widget_type == "slo2":
        if draft.slo_name is None:
            violations.append("slo_name is Null")
        return violations
    if draft.metric is None:
        violations.append("metric is Null")
    if draft.aggregation is None:
        violations.append("aggregation is Null")
    if draft.metric is not None and draft.aggregation is not None:
        if draft.aggregation not in vocab.metrics.get(draft.metric, ()):
            violations.append(f"aggregation {draft.aggregation} is not valid for metric {draft.metric}")
    if draft.widget_type == "topList":
        g = draft.grouping
        if g is None or g.group_by_tag is None or g.direction is None or g.max_results is None:
            violations.append("topList grouping requires groupbyTag, direction and maxResults")
    if draft.widget_type in ("bigNumber", "pie") and draft.grouping is not None:
        violations.append(f"grouping is not allowed for {draft.widget_type}")
    return violations


def build_widget_spec(
    draft: ExtractionResult,
    time_range_minutes: int,
    vocab: GlobalVocabulary,
    formatting: dict | None = None,
) -> WidgetSpec:
    """Populate the widget document from a completed draft.

    The draft must satisfy the previewable invariants; violations are
    reported together in one ContractError. Formatting preferences pass
    through untouched.
    """
    violations = check_previewable(draft, vocab)
    if time_range_minutes is None or time_range_minutes <= 0:
        violations.append("time range must be a positive number of minutes")
    if violations:
        raise ContractError(violations)

    if draft.widget_type == "slo2":
        return WidgetSpec(
            type="slo2",
            title=draft.slo_name,
            config={"name": draft.slo_name},
            time_range_minutes=time_range_minutes,
        )

    grouping = draft.grouping
    if grouping is not None and grouping.is_empty():
        grouping = None
    source = DataSource(
        metric=draft.metric,
        aggregation=draft.aggregation,
        tag_filter=dict(draft.filter),
        grouping=grouping,
    )
    config = {
        "rendering": dict(RENDERING_DEFAULTS[draft.widget_type]),
        "formatting": dict(formatting) if formatting else {},
        "data_sources": [source.to_dict()],
    }
    return WidgetSpec(
        type=draft.widget_type,
        title=source.label,
        config=config,
        time_range_minutes=time_range_minutes,
    )


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue]

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_widget_json(document: str) -> ValidationReport:
    """Validate serialized widget JSON against the published schema.

    Issues carry JSON-pointer paths; a syntax error is itself an issue at
    the document root. An empty report means the document is valid.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        return ValidationReport(issues=[ValidationIssue(path="", message=f"syntax error: {exc}")])
    issues = [
        ValidationIssue(
            path="/" + "/".join(str(part) for part in error.absolute_path),
            message=error.message,
        )
        for error in _validator().iter_errors(doc)
    ]
    issues.sort(key=lambda issue: (issue.path, issue.message))
    return ValidationReport(issues=issues)


def data_request_params(spec: WidgetSpec, now: float | None = None) -> dict:
    """Retrieval parameters the frontend or mock API needs for this widget."""
    if spec.type == "slo2":
        return {"slo_name": spec.config["name"]}
    if now is None:
        now = time.time()
    end_ms = int(now * 1000)
    source = spec.config["data_sources"][0]
    params: dict = {
        "metric": source["metric"],
        "aggregation": source["aggregation"],
        "filter": dict(source["filter"]),
        "window_start_ms": end_ms - spec.time_range_minutes * 60 * 1000,
        "window_end_ms": end_ms,
    }
    grouping = source.get("grouping")
    if grouping:
        if "groupbyTag" in grouping:
            params["group_by"] = grouping["groupbyTag"]
        if "direction" in grouping:
            params["order"] = grouping["direction"]
        if "maxResults" in grouping:
            params["limit"] = grouping["maxResults"]
    return params
