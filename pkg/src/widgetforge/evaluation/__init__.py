"""Evaluation harness: dataset loading, scoring, reports, significance."""

from .harness import (
    AccuracyReport,
    FieldScores,
    RunConfig,
    catalog_from_records,
    render_table,
    run_eval,
    score_record,
)
from .records import EvalRecord, load_dataset
from .significance import compare_runs, exact_mcnemar
from .taxonomy import ERROR_CATEGORIES, classify_failures

__all__ = [
    "AccuracyReport",
    "EvalRecord",
    "ERROR_CATEGORIES",
    "FieldScores",
    "RunConfig",
    "catalog_from_records",
    "classify_failures",
    "compare_runs",
    "exact_mcnemar",
    "load_dataset",
    "render_table",
    "run_eval",
    "score_record",
]
