"""Paired significance testing between two evaluation runs.

Exact two-sided McNemar test on the discordant pairs: with b and c the
counts of records each run alone got right, the p-value is the doubled
binomial tail min(1, 2 * P[X <= min(b, c)]) for X ~ Binomial(b + c, 1/2).
"""

from __future__ import annotations

import math

from ..errors import ComparisonError


def exact_mcnemar(b: int, c: int) -> float:
    """Exact two-sided McNemar p-value for discordant counts b and c."""
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be non-negative")
    n = b + c
    if n == 0:
        return 1.0
    k = min(b, c)
    tail = sum(math.comb(n, i) for i in range(k + 1))
    return min(1.0, 2 * tail / 2**n)


def _overall_vector(report: dict) -> list[bool]:
    try:
        vector = report["per_record_overall"]
    except (TypeError, KeyError):
        raise ComparisonError("report is missing the per_record_overall vector") from None
    return [bool(v) for v in vector]


def compare_runs(a: dict, b: dict) -> dict:
    """Significance summary for two AccuracyReport JSON documents covering
    the same dataset."""
    va = _overall_vector(a)
    vb = _overall_vector(b)
    if len(va) != len(vb):
        raise ComparisonError(
            f"reports cover different dataset sizes ({len(va)} vs {len(vb)})"
        )
    if not va:
        raise ComparisonError("reports contain no records")
    b_only = sum(1 for x, y in zip(va, vb) if y and not x)
    a_only = sum(1 for x, y in zip(va, vb) if x and not y)
    delta = sum(vb) - sum(va)
    p_value = exact_mcnemar(b_only, a_only)
    return {
        "total": len(va),
        "a_correct": sum(va),
        "b_correct": sum(vb),
        "delta_correct": delta,
        "delta_percentage": round(100.0 * delta / len(va), 2),
        "b_only": b_only,
        "a_only": a_only,
        "p_value": p_value,
        "significant_at_0_05": p_value < 0.05,
    }
