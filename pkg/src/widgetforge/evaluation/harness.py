"""Evaluation runner: per-field and strict-overall accuracy.

Scoring compares the post-resolution prediction against ground truth:
widget type after token canonicalization, metric/aggregation by equality
(both-null counts as equal), tag filter by exact map equality, grouping
by all three subfields with maxResults compared numerically. A record
counts toward overall accuracy only when all five fields are correct.

The grouping column is reported under both denominators: per_field uses
all records (both-null grouping counts correct, which keeps strict
overall dominated by every per-field count), and grouping_subset scores
only the records whose ground truth requires grouping.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..catalog import EntityCatalog, KnowledgeBase
from ..errors import ConfigurationError, FieldValidationError, ParseError, TransportError
from ..llm import HttpLLMClient, ReplayLLMClient
from ..parsing import (
    ExtractionResult,
    extract_data_sources,
    infer_widget_type,
    normalize_widget_type,
)
from ..prompts import build_prompts
from ..resolver import DEFAULT_THRESHOLD, TrigramSimilarity, resolve_extraction
from ..vocabulary import GlobalVocabulary, load_global_vocabulary
from .records import EvalRecord, load_dataset
from .taxonomy import ERROR_CATEGORIES, classify_failures

log = logging.getLogger(__name__)

FIELD_NAMES = ("widget_type", "metric", "aggregation", "tag_filter", "grouping")


@dataclass(frozen=True)
class FieldScores:
    widget_type: bool
    metric: bool
    aggregation: bool
    tag_filter: bool
    grouping: bool

    @property
    def overall(self) -> bool:
        return (
            self.widget_type
            and self.metric
            and self.aggregation
            and self.tag_filter
            and self.grouping
        )


def _normalized_grouping(predicted: ExtractionResult) -> dict | None:
    g = predicted.grouping
    if g is None or g.is_empty():
        return None
    return {
        "groupbyTag": g.group_by_tag,
        "direction": g.direction,
        "maxResults": g.max_results,
    }


def _grouping_equal(pred: dict | None, gt: dict | None) -> bool:
    if pred is None or gt is None:
        return pred is None and gt is None
    if pred["groupbyTag"] != gt["groupbyTag"] or pred["direction"] != gt["direction"]:
        return False
    try:
        return int(pred["maxResults"]) == int(gt["maxResults"])
    except (TypeError, ValueError):
        return False


def score_record(predicted: ExtractionResult, gt: EvalRecord) -> FieldScores:
    gt_type = normalize_widget_type(gt.gt_widget_type) if gt.gt_widget_type is not None else None
    return FieldScores(
        widget_type=predicted.widget_type == gt_type,
        metric=predicted.metric == gt.gt_metric,
        aggregation=predicted.aggregation == gt.gt_aggregation,
        tag_filter=predicted.filter == gt.gt_filter,
        grouping=_grouping_equal(_normalized_grouping(predicted), gt.gt_grouping),
    )


def catalog_from_records(records: list[EvalRecord]) -> EntityCatalog:
    """Entity catalog implied by the ground truth, standing in for the
    monitored instance the dataset was authored against."""
    services, applications, endpoints, slos = set(), set(), set(), set()
    for record in records:
        for key, value in record.gt_filter.items():
            if key == "service.name":
                services.add(value)
            elif key == "application.name":
                applications.add(value)
            elif key == "endpoint.name":
                endpoints.add(value)
        if record.slo_name:
            slos.add(record.slo_name)
    return EntityCatalog(
        services=frozenset(services),
        applications=frozenset(applications),
        endpoints=frozenset(endpoints),
        slo_configs=frozenset(slos),
        fetched_at=0.0,
        source_instance="eval-dataset",
    )


@dataclass
class RunConfig:
    dataset_path: str
    llm_mode: str = "replay"
    replay_file: str | None = None
    few_shot: bool = True
    threshold: float = DEFAULT_THRESHOLD
    output_path: str | None = None
    max_workers: int = 1

    def to_json_dict(self) -> dict:
        return {
            "dataset_path": str(self.dataset_path),
            "llm_mode": self.llm_mode,
            "replay_file": str(self.replay_file) if self.replay_file else None,
            "few_shot": self.few_shot,
            "threshold": self.threshold,
        }


@dataclass
class AccuracyReport:
    per_field: dict[str, dict]
    overall: dict
    grouping_subset: dict
    grouping_subset_total: int
    error_breakdown: dict[str, int]
    uncategorized: int
    filter_clause_recall: dict
    per_record_overall: list[bool]
    failed_records: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "per_field": self.per_field,
            "overall": self.overall,
            "grouping_subset": self.grouping_subset,
            "grouping_subset_total": self.grouping_subset_total,
            "error_breakdown": self.error_breakdown,
            "uncategorized": self.uncategorized,
            "filter_clause_recall": self.filter_clause_recall,
            "per_record_overall": self.per_record_overall,
            "failed_records": self.failed_records,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AccuracyReport":
        return cls(
            per_field=doc["per_field"],
            overall=doc["overall"],
            grouping_subset=doc["grouping_subset"],
            grouping_subset_total=doc["grouping_subset_total"],
            error_breakdown=doc["error_breakdown"],
            uncategorized=doc.get("uncategorized", 0),
            filter_clause_recall=doc.get("filter_clause_recall", {}),
            per_record_overall=[bool(v) for v in doc["per_record_overall"]],
            failed_records=doc.get("failed_records", []),
            config=doc.get("config", {}),
        )


def _cell(correct: int, total: int) -> dict:
    percentage = round(100.0 * correct / total, 2) if total else 0.0
    return {"correct": correct, "total": total, "percentage": percentage}


def _predict(record: EvalRecord, prompts, llm, kb, matcher, vocab) -> tuple[ExtractionResult, str | None]:
    try:
        widget_type = infer_widget_type(record.query, prompts, llm)
        raw = extract_data_sources(record.query, widget_type, prompts, llm, vocab)
    except (ParseError, FieldValidationError, TransportError) as exc:
        log.warning("record %d failed: %s", record.line_no, exc)
        return ExtractionResult(), str(exc)
    draft, _ = resolve_extraction(raw, kb, matcher)
    return draft, None


def run_eval(
    config: RunConfig,
    vocab: GlobalVocabulary | None = None,
    llm=None,
    kb: KnowledgeBase | None = None,
    matcher=None,
) -> AccuracyReport:
    vocab = vocab or load_global_vocabulary()
    records = load_dataset(config.dataset_path, vocab)
    prompts = build_prompts(vocab, few_shot=config.few_shot)
    if llm is None:
        if config.llm_mode == "replay":
            if not config.replay_file:
                raise ConfigurationError("replay_file", "replay mode requires a replay file")
            llm = ReplayLLMClient(config.replay_file)
        elif config.llm_mode == "live":
            llm = HttpLLMClient.from_env()
        else:
            raise ConfigurationError("llm_mode", f"unknown mode {config.llm_mode!r}")
    if kb is None:
        kb = KnowledgeBase.from_catalog(vocab, catalog_from_records(records))
    if matcher is None:
        matcher = TrigramSimilarity(threshold=config.threshold)

    predictions: list[tuple[ExtractionResult, str | None]] = [None] * len(records)
    if config.max_workers > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            futures = {
                pool.submit(_predict, record, prompts, llm, kb, matcher, vocab): i
                for i, record in enumerate(records)
            }
            for future, i in futures.items():
                predictions[i] = future.result()
    else:
        for i, record in enumerate(records):
            predictions[i] = _predict(records[i], prompts, llm, kb, matcher, vocab)

    field_correct = {name: 0 for name in FIELD_NAMES}
    overall_correct = 0
    subset_correct = 0
    subset_total = 0
    breakdown = {category: 0 for category in ERROR_CATEGORIES}
    uncategorized = 0
    clause_total = 0
    clause_matched = 0
    per_record_overall: list[bool] = []
    failed_records: list[dict] = []

    for i, record in enumerate(records):
        predicted, failure = predictions[i]
        if failure is not None:
            failed_records.append({"index": i, "line_no": record.line_no, "reason": failure})
        scores = score_record(predicted, record)
        for name in FIELD_NAMES:
            if getattr(scores, name):
                field_correct[name] += 1
        if record.grouping_required:
            subset_total += 1
            if scores.grouping:
                subset_correct += 1
        per_record_overall.append(scores.overall)
        if scores.overall:
            overall_correct += 1
        else:
            categories, extra = classify_failures(predicted, record, scores)
            for category in categories:
                breakdown[category] += 1
            uncategorized += extra
        for key, value in record.gt_filter.items():
            clause_total += 1
            if predicted.filter.get(key) == value:
                clause_matched += 1

    total = len(records)
    report = AccuracyReport(
        per_field={name: _cell(field_correct[name], total) for name in FIELD_NAMES},
        overall=_cell(overall_correct, total),
        grouping_subset=_cell(subset_correct, subset_total),
        grouping_subset_total=subset_total,
        error_breakdown=breakdown,
        uncategorized=uncategorized,
        filter_clause_recall=_cell(clause_matched, clause_total),
        per_record_overall=per_record_overall,
        failed_records=failed_records,
        config=config.to_json_dict(),
    )
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
    return report


_TABLE_COLUMNS = (
    ("Widget Type", "widget_type"),
    ("Metric", "metric"),
    ("Aggregation", "aggregation"),
    ("Tag Filter", "tag_filter"),
    ("Grouping", None),
    ("Overall", None),
)


def render_table(report: AccuracyReport) -> str:
    """Text table with the six accuracy columns; the Grouping column shows
    the grouping-required-subset percentage."""
    values = []
    for header, key in _TABLE_COLUMNS:
        if key is not None:
            cell = report.per_field[key]
        elif header == "Grouping":
            cell = report.grouping_subset
        else:
            cell = report.overall
        values.append((header, f"{cell['percentage']:.2f}% ({cell['correct']}/{cell['total']})"))
    widths = [max(len(h), len(v)) for h, v in values]
    header_row = "  ".join(h.ljust(w) for (h, _), w in zip(values, widths))
    value_row = "  ".join(v.ljust(w) for (_, v), w in zip(values, widths))
    grouping_all = report.per_field["grouping"]
    footnote = (
        f"Grouping column scores the {report.grouping_subset['total']} grouping-required records; "
        f"over all {grouping_all['total']} records it is {grouping_all['percentage']:.2f}%."
    )
    lines = [header_row, "-" * len(header_row), value_row, footnote]
    breakdown = ", ".join(f"{k}={v}" for k, v in report.error_breakdown.items())
    lines.append(f"Error breakdown: {breakdown}; uncategorized={report.uncategorized}")
    return "\n".join(lines)
