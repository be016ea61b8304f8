"""Evaluation dataset records and the JSONL loader.

One record per line: {query, widget_type, metric, aggregation, filter,
grouping} with JSON null for absent ground truth. Records are validated
against the global vocabulary at load time; any violation reports the
offending line number.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DatasetError
from ..parsing import normalize_widget_type
from ..vocabulary import CALL_TYPES, FILTER_KEYS, GlobalVocabulary

log = logging.getLogger(__name__)

_GROUPING_KEYS = {"groupbyTag", "direction", "maxResults"}


@dataclass(frozen=True)
class EvalRecord:
    query: str
    gt_widget_type: str | None
    gt_metric: str | None
    gt_aggregation: str | None
    gt_filter: dict[str, str] = field(default_factory=dict)
    gt_grouping: dict | None = None
    slo_name: str | None = None
    line_no: int = 0

    @property
    def grouping_required(self) -> bool:
        return self.gt_grouping is not None


def _parse_grouping(raw, line_no: int, vocab: GlobalVocabulary) -> dict | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise DatasetError(line_no, "grouping must be an object or null")
    if set(raw) != _GROUPING_KEYS:
        raise DatasetError(line_no, f"grouping must have exactly keys {sorted(_GROUPING_KEYS)}")
    tag = raw["groupbyTag"]
    if tag not in vocab.grouping_tags:
        raise DatasetError(line_no, f"unknown groupbyTag {tag!r}")
    direction = raw["direction"]
    if direction not in vocab.directions:
        raise DatasetError(line_no, f"unknown direction {direction!r}")
    max_raw = raw["maxResults"]
    try:
        max_results = int(max_raw)
    except (TypeError, ValueError):
        raise DatasetError(line_no, f"maxResults {max_raw!r} is not numeric") from None
    if max_results not in vocab.max_results_options:
        raise DatasetError(line_no, f"maxResults {max_results} not in {vocab.max_results_options}")
    return {"groupbyTag": tag, "direction": direction, "maxResults": max_results}


def _parse_filter(raw, line_no: int) -> dict[str, str]:
    if not isinstance(raw, dict):
        raise DatasetError(line_no, "filter must be an object")
    parsed: dict[str, str] = {}
    for key, value in raw.items():
        if key not in FILTER_KEYS:
            raise DatasetError(line_no, f"unknown filter key {key!r}")
        if not isinstance(value, str) or not value:
            raise DatasetError(line_no, f"filter value for {key!r} must be a non-empty string")
        if key == "call.type" and value not in CALL_TYPES:
            raise DatasetError(line_no, f"unknown call.type {value!r}")
        if key == "call.erroneous" and value not in ("true", "false"):
            raise DatasetError(line_no, f"call.erroneous must be true or false, got {value!r}")
        parsed[key] = value
    return parsed


def record_from_dict(doc: dict, line_no: int, vocab: GlobalVocabulary) -> EvalRecord:
    for required in ("query", "widget_type", "metric", "aggregation", "filter", "grouping"):
        if required not in doc:
            raise DatasetError(line_no, f"missing key {required!r}")
    query = doc["query"]
    if not isinstance(query, str) or not query.strip():
        raise DatasetError(line_no, "query must be a non-empty string")

    widget_type = doc["widget_type"]
    if widget_type is not None and normalize_widget_type(widget_type) is None:
        raise DatasetError(line_no, f"unknown widget type {widget_type!r}")

    metric = doc["metric"]
    if metric is not None and metric not in vocab.metrics:
        raise DatasetError(line_no, f"unknown metric {metric!r}")

    aggregation = doc["aggregation"]
    if aggregation is not None and aggregation not in vocab.aggregations_for(None):
        raise DatasetError(line_no, f"unknown aggregation {aggregation!r}")

    slo_name = doc.get("slo_name")
    if slo_name is not None and (not isinstance(slo_name, str) or not slo_name):
        raise DatasetError(line_no, "slo_name must be a non-empty string when present")

    return EvalRecord(
        query=query,
        gt_widget_type=widget_type,
        gt_metric=metric,
        gt_aggregation=aggregation,
        gt_filter=_parse_filter(doc["filter"], line_no),
        gt_grouping=_parse_grouping(doc["grouping"], line_no, vocab),
        slo_name=slo_name,
        line_no=line_no,
    )


def load_dataset(path, vocab: GlobalVocabulary) -> list[EvalRecord]:
    text = Path(path).read_text("utf-8")
    records: list[EvalRecord] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(line_no, f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise DatasetError(line_no, "record must be a JSON object")
        records.append(record_from_dict(doc, line_no, vocab))
    if not records:
        log.warning("dataset %s contains no records", path)
    return records


def record_to_dict(record: EvalRecord) -> dict:
    doc = {
        "query": record.query,
        "widget_type": record.gt_widget_type,
        "metric": record.gt_metric,
        "aggregation": record.gt_aggregation,
        "filter": record.gt_filter,
        "grouping": record.gt_grouping,
    }
    if record.slo_name is not None:
        doc["slo_name"] = record.slo_name
    return doc
