"""Failure taxonomy for scored records.

Categories: widget_type_error, ambiguous_naming, incomplete_extraction,
complete_failure, implicit_parameter, incorrect_grouping_tag. Wrong
metric or aggregation values fit none of them and are tallied separately
as a diagnostic.
"""

from __future__ import annotations

from ..parsing import ExtractionResult
from .records import EvalRecord

ERROR_CATEGORIES = (
    "widget_type_error",
    "ambiguous_naming",
    "incomplete_extraction",
    "complete_failure",
    "implicit_parameter",
    "incorrect_grouping_tag",
)


def _predicted_tag(predicted: ExtractionResult) -> str | None:
    if predicted.grouping is None or predicted.grouping.is_empty():
        return None
    return predicted.grouping.group_by_tag


def classify_failures(predicted: ExtractionResult, gt: EvalRecord, scores) -> tuple[list[str], int]:
    """Categories for each incorrectly-extracted field, plus a count of
    failures outside the taxonomy (wrong metric/aggregation values)."""
    categories: list[str] = []
    uncategorized = 0

    if not scores.widget_type:
        categories.append("widget_type_error")

    if not scores.tag_filter:
        pred_filter = predicted.filter
        gt_filter = gt.gt_filter
        shared_mismatch = any(
            key in pred_filter and pred_filter[key] != value for key, value in gt_filter.items()
        )
        if not pred_filter and gt_filter:
            categories.append("complete_failure")
        elif shared_mismatch:
            categories.append("ambiguous_naming")
        else:
            categories.append("incomplete_extraction")

    if not scores.grouping:
        pred_tag = _predicted_tag(predicted)
        gt_tag = gt.gt_grouping["groupbyTag"] if gt.gt_grouping else None
        if gt_tag is not None and pred_tag is None:
            categories.append("implicit_parameter")
        elif gt_tag is not None and pred_tag is not None and pred_tag != gt_tag:
            categories.append("incorrect_grouping_tag")
        elif gt_tag is None and pred_tag is not None:
            categories.append("incorrect_grouping_tag")
        else:
            # Tag matched; direction or maxResults was missed or wrong.
            categories.append("implicit_parameter")

    if not scores.metric or not scores.aggregation:
        uncategorized = 1

    return categories, uncategorized
