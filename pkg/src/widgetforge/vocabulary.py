"""Deployment-invariant vocabulary: widget types, metrics, aggregations,
filter keys, and grouping options.

The vocabulary is loaded from a single embedded JSON document whose layout
doubles as the knowledge block substituted into the extraction prompts.
Loading validates the closed sets exactly; any drift from the supported
values is a fatal configuration error, because every downstream component
(parser validation, schema constraints, clarification options) assumes them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError

log = logging.getLogger(__name__)

WIDGET_TYPES = ("bigNumber", "TIME_SERIES", "pie", "slo2", "topList")
NULL_TOKEN = "Null"

# Canonical aggregation order, as listed in the extraction prompt.
AGGREGATIONS = (
    "SUM", "PER_SECOND", "MEAN", "MIN", "MAX",
    "P25", "P50", "P75", "P90", "P95", "P98", "P99",
)

FILTER_KEYS = (
    "service.name", "application.name", "endpoint.name",
    "technology.name", "call.type", "call.erroneous",
)

# Filter keys whose values name runtime entities and go through fuzzy
# resolution. technology.name is deliberately absent: no catalog exists
# for technologies, so its values pass through as free text.
ENTITY_FILTER_KEYS = ("service.name", "application.name", "endpoint.name")

CALL_TYPES = ("BATCH", "DATABASE", "HTTP", "GRAPHQL", "RPC", "MESSAGING", "OPENTELEMETRY")
GROUPING_TAGS = ("call.error.message", "endpoint.name", "call.http.path", "call.http.status", "http.url", "service.name")
DIRECTIONS = ("ASC", "DESC")
MAX_RESULTS_OPTIONS = (5, 10, 20, 50)


@dataclass(frozen=True)
class GlobalVocabulary:
    """Validated Type I knowledge: closed value sets plus prompt metadata.

    Ordered tuples preserve the configuration order so completion options
    and prompt renderings are deterministic; membership checks treat them
    as sets.
    """

    widget_types: tuple[str, ...]
    metrics: dict[str, tuple[str, ...]]
    filter_keys: tuple[str, ...]
    call_types: tuple[str, ...]
    grouping_tags: tuple[str, ...]
    directions: tuple[str, ...]
    max_results_options: tuple[int, ...]
    raw: dict = field(compare=False, repr=False)

    @property
    def metric_names(self) -> tuple[str, ...]:
        return tuple(self.metrics)

    def aggregations_for(self, metric: str | None) -> tuple[str, ...]:
        """Aggregations legal for a metric; the full union when unknown."""
        if metric is not None and metric in self.metrics:
            return self.metrics[metric]
        union = {a for aggs in self.metrics.values() for a in aggs}
        return tuple(a for a in AGGREGATIONS if a in union)

    def knowledge_json(self) -> str:
        """The full vocabulary block substituted into extraction prompts."""
        return json.dumps(self.raw, indent=4)

    def widget_type_knowledge_json(self) -> str:
        """The type-descriptions block embedded in the widget-type prompt."""
        return json.dumps({"type": self.raw["type"]}, indent=4)


def _require(config: dict, key: str) -> dict:
    if key not in config:
        raise ConfigurationError(key, "required section is missing")
    if not isinstance(config[key], dict):
        raise ConfigurationError(key, "section must be a JSON object")
    return config[key]


def load_global_vocabulary(source: str | Path | None = None) -> GlobalVocabulary:
    """Load and validate the embedded vocabulary configuration.

    ``source`` overrides the packaged default, mainly for tests that
    exercise malformed configurations.
    """
    if source is None:
        text = resources.files("widgetforge").joinpath("data/global_vocabulary.json").read_text("utf-8")
    else:
        text = Path(source).read_text("utf-8")
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError("(document)", f"not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigurationError("(document)", "top level must be a JSON object")

    types = _require(config, "type")
    if tuple(types) != WIDGET_TYPES + (NULL_TOKEN,):
        raise ConfigurationError("type", f"widget types must be exactly {WIDGET_TYPES + (NULL_TOKEN,)}, got {tuple(types)}")

    metric_section = _require(config, "metric")
    if set(metric_section) != {"calls", "latency", "erroneousCalls", "errors"}:
        raise ConfigurationError("metric", f"metric names must be exactly calls/latency/erroneousCalls/errors, got {sorted(metric_section)}")
    metrics: dict[str, tuple[str, ...]] = {}
    for name, entry in metric_section.items():
        aggs = entry.get("aggregations") if isinstance(entry, dict) else None
        if not aggs or not isinstance(aggs, list):
            raise ConfigurationError(f"metric.{name}", "missing aggregations list")
        bad = [a for a in aggs if a not in AGGREGATIONS]
        if bad:
            raise ConfigurationError(f"metric.{name}", f"unknown aggregations {bad}")
        metrics[name] = tuple(aggs)

    filter_section = _require(config, "filter")
    if tuple(filter_section) != FILTER_KEYS:
        raise ConfigurationError("filter", f"filter keys must be exactly {FILTER_KEYS}, got {tuple(filter_section)}")
    call_types = tuple(filter_section["call.type"].get("values", ()))
    if call_types != CALL_TYPES:
        raise ConfigurationError("filter.call.type", f"call types must be exactly {CALL_TYPES}, got {call_types}")

    grouping = _require(config, "grouping")
    for key in ("groupbyTag", "direction", "maxResults"):
        if key not in grouping:
            raise ConfigurationError(f"grouping.{key}", "required subfield is missing")
    tags = tuple(grouping["groupbyTag"].get("values", ()))
    if tags != GROUPING_TAGS:
        raise ConfigurationError("grouping.groupbyTag", f"grouping tags must be exactly {GROUPING_TAGS}, got {tags}")
    directions = tuple(grouping["direction"].get("values", ()))
    if directions != DIRECTIONS:
        raise ConfigurationError("grouping.direction", f"directions must be exactly {DIRECTIONS}, got {directions}")
    max_results = tuple(grouping["maxResults"].get("values", ()))
    if max_results != MAX_RESULTS_OPTIONS:
        raise ConfigurationError("grouping.maxResults", f"max results options must be exactly {MAX_RESULTS_OPTIONS}, got {max_results}")

    vocab = GlobalVocabulary(
        widget_types=WIDGET_TYPES + (NULL_TOKEN,),
        metrics=metrics,
        filter_keys=FILTER_KEYS,
        call_types=call_types,
        grouping_tags=tags,
        directions=directions,
        max_results_options=max_results,
        raw=config,
    )
    log.debug("vocabulary loaded: %d metrics, %d filter keys", len(metrics), len(FILTER_KEYS))
    return vocab
