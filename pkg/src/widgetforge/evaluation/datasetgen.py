"""Synthetic evaluation dataset generator.

Produces a size-matched corpus: 271 single-turn queries, exactly 48 with
grouping ground truth (only on groupable widget types), exactly 252 with
a non-empty tag filter, deliberate null fields, and lowercase
"time_series" tokens in the file to exercise canonicalization. The
generator is fully seeded so the committed dataset is reproducible.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from ..vocabulary import CALL_TYPES, GROUPING_TAGS, MAX_RESULTS_OPTIONS

DATASET_SEED = 20250817

TOTAL_RECORDS = 271
GROUPING_RECORDS = 48
NONEMPTY_FILTER_RECORDS = 252

SERVICES = (
    "catalogue",
    "payment",
    "shipping",
    "user",
    "ratings",
    "qotd-web service",
    "robot-shop catalogue service",
    "robot-shop shipping service",
    "appdata-writer",
    "appdata-reader",
    "nginx-web",
    "otel-shop-payment",
)
APPLICATIONS = ("Robot Shop", "qotd irl", "Think Demo 2025", "otel-shop", "selfhost1-instana")
ENDPOINTS = ("POST /login", "GET /images", "sli_configurations", "GET /products", "POST /checkout")
SLO_CONFIGS = ("Great Expectations", "[demo]RobotShop - ep 123", "checkout-availability")
TECHNOLOGIES = ("python", "java", "nodejs", "go")

_METRIC_PHRASES = {
    "latency": ("latency", "response time"),
    "calls": ("call volume", "number of calls", "calls"),
    "erroneousCalls": ("erroneous calls", "failed calls"),
    "errors": ("error rate",),
}
_AGG_PHRASES = {
    "SUM": "total",
    "PER_SECOND": "per-second",
    "MEAN": "mean",
    "MIN": "minimum",
    "MAX": "maximum",
    "P25": "25th percentile",
    "P50": "median",
    "P75": "75th percentile",
    "P90": "90th percentile",
    "P95": "95th percentile",
    "P98": "98th percentile",
    "P99": "99th percentile",
}
_TYPE_OPENERS = {
    "time_series": ("show a time series of", "plot", "chart over time:", "graph"),
    "bigNumber": ("show a big number with", "single stat:", "display the current"),
    "pie": ("pie chart of", "show a pie breakdown of"),
    "topList": ("top list of", "rank the", "show a leaderboard of"),
    None: ("show", "display", "give me", "I want to see"),
}
_TAIL_HINTS = ("", " for the last hour", " over the past day", " right now", " on production")

# Per-metric aggregations the generator may pick (must stay inside the
# vocabulary's legal sets).
_METRIC_AGGS = {
    "latency": ("MEAN", "MIN", "MAX", "P25", "P50", "P75", "P90", "P95", "P98", "P99"),
    "calls": ("SUM", "PER_SECOND"),
    "erroneousCalls": ("SUM", "PER_SECOND"),
    "errors": ("MEAN",),
}


def _filter_phrase(tag_filter: dict[str, str]) -> str:
    parts = []
    for key, value in sorted(tag_filter.items()):
        if key == "service.name":
            parts.append(f"for the {value} service")
        elif key == "application.name":
            parts.append(f"in the {value} application")
        elif key == "endpoint.name":
            parts.append(f"on the {value} endpoint")
        elif key == "call.type":
            parts.append(f"for {value} calls")
        elif key == "call.erroneous":
            parts.append("erroneous only" if value == "true" else "successful only")
        elif key == "technology.name":
            parts.append(f"running on {value}")
    return " ".join(parts)


def _grouping_phrase(grouping: dict) -> str:
    direction_word = "ascending" if grouping["direction"] == "ASC" else "descending"
    return (
        f" grouped by {grouping['groupbyTag']} showing {grouping['maxResults']} "
        f"results {direction_word}"
    )


def _make_filter(rng: random.Random, size: int) -> dict[str, str]:
    tag_filter: dict[str, str] = {}
    keys = ["service.name", "application.name", "endpoint.name"]
    rng.shuffle(keys)
    extras = ["call.type", "call.erroneous", "technology.name"]
    rng.shuffle(extras)
    pool = keys[:2] + extras
    for key in pool[:size]:
        if key == "service.name":
            tag_filter[key] = rng.choice(SERVICES)
        elif key == "application.name":
            tag_filter[key] = rng.choice(APPLICATIONS)
        elif key == "endpoint.name":
            tag_filter[key] = rng.choice(ENDPOINTS)
        elif key == "call.type":
            tag_filter[key] = rng.choice(CALL_TYPES)
        elif key == "call.erroneous":
            tag_filter[key] = rng.choice(("true", "false"))
        else:
            tag_filter[key] = rng.choice(TECHNOLOGIES)
    return tag_filter


def generate_records(seed: int = DATASET_SEED) -> list[dict]:
    rng = random.Random(seed)
    plans: list[dict] = []

    # Widget-type allocation. topList always carries grouping; 8 of the
    # time-series records do as well, for 48 grouping records total.
    plans += [{"type": "time_series", "grouped": True} for _ in range(8)]
    plans += [{"type": "time_series", "grouped": False} for _ in range(100)]
    plans += [{"type": "topList", "grouped": True} for _ in range(40)]
    plans += [{"type": "bigNumber", "grouped": False} for _ in range(60)]
    plans += [{"type": "pie", "grouped": False} for _ in range(40)]
    plans += [{"type": "slo2", "grouped": False} for _ in range(8)]
    plans += [{"type": None, "grouped": False} for _ in range(15)]
    assert len(plans) == TOTAL_RECORDS
    assert sum(1 for p in plans if p["grouped"]) == GROUPING_RECORDS

    # Empty-filter allocation: every slo2 record plus 11 others.
    empty_filter_targets = (
        [("time_series", False)] * 4 + [("bigNumber", False)] * 3 + [("pie", False)] * 2 + [(None, False)] * 2
    )
    for plan in plans:
        plan["empty_filter"] = plan["type"] == "slo2"
    for target_type, _ in empty_filter_targets:
        for plan in plans:
            if plan["type"] == target_type and not plan["empty_filter"] and not plan["grouped"]:
                plan["empty_filter"] = True
                break
    assert sum(1 for p in plans if not p["empty_filter"]) == NONEMPTY_FILTER_RECORDS

    # Null metric/aggregation allocation: 6 records with both null, 5 with
    # aggregation only null (the query names a metric but no function).
    both_null = 0
    agg_null = 0
    for plan in plans:
        if plan["type"] in ("bigNumber", "time_series") and not plan["grouped"]:
            if both_null < 6 and not plan["empty_filter"]:
                plan["null_metric"] = True
                both_null += 1
                continue
            if agg_null < 5:
                plan["null_aggregation"] = True
                agg_null += 1

    rng.shuffle(plans)

    records: list[dict] = []
    used_queries: set[str] = set()
    for plan in plans:
        widget_type = plan["type"]
        if widget_type == "slo2":
            slo = rng.choice(SLO_CONFIGS)
            query = rng.choice(
                (
                    f"add an SLO widget for {slo}",
                    f"show the {slo} SLO",
                    f"I want the service level objective widget for {slo}",
                )
            )
            record = {
                "query": query,
                "widget_type": "slo2",
                "metric": None,
                "aggregation": None,
                "filter": {},
                "grouping": None,
                "slo_name": slo,
            }
        else:
            if plan.get("null_metric"):
                metric = None
                aggregation = None
            else:
                metric = rng.choice(tuple(_METRIC_AGGS))
                aggregation = None if plan.get("null_aggregation") else rng.choice(_METRIC_AGGS[metric])
            tag_filter = {} if plan["empty_filter"] else _make_filter(rng, rng.choice((1, 1, 1, 2, 2, 3)))
            grouping = None
            if plan["grouped"]:
                grouping = {
                    "groupbyTag": rng.choice(GROUPING_TAGS),
                    "direction": rng.choice(("ASC", "DESC")),
                    "maxResults": rng.choice(MAX_RESULTS_OPTIONS),
                }
            opener = rng.choice(_TYPE_OPENERS[widget_type])
            metric_phrase = (
                rng.choice(_METRIC_PHRASES[metric]) if metric else "an overview"
            )
            agg_phrase = f"{_AGG_PHRASES[aggregation]} " if aggregation else ""
            query = f"{opener} {agg_phrase}{metric_phrase}"
            if tag_filter:
                query += " " + _filter_phrase(tag_filter)
            if grouping:
                query += _grouping_phrase(grouping)
            query += rng.choice(_TAIL_HINTS)
            record = {
                "query": query,
                "widget_type": widget_type,
                "metric": metric,
                "aggregation": aggregation,
                "filter": tag_filter,
                "grouping": grouping,
            }
        attempt = 1
        base_query = record["query"]
        while record["query"] in used_queries:
            attempt += 1
            record["query"] = f"{base_query} (variant {attempt})"
        used_queries.add(record["query"])
        records.append(record)
    return records


def write_dataset(path, seed: int = DATASET_SEED) -> int:
    records = generate_records(seed)
    lines = [json.dumps(record, ensure_ascii=False) for record in records]
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")
    return len(records)
