"""Replay-fixture builders for offline evaluation runs.

A fixture records, for each dataset query, the pass-1 widget-type token
and the pass-2 extraction JSON the model is expected to emit. The
oracle builder answers with ground truth exactly; the corruption
builders derive single-field-wrong variants from it for the adversarial
accuracy checks.
"""

from __future__ import annotations

import json

from ..llm import ReplayLLMClient
from ..parsing import normalize_widget_type
from ..prompts import PromptPack
from ..vocabulary import GROUPING_TAGS, NULL_TOKEN
from .records import EvalRecord


def _pass2_response(record: EvalRecord, widget_type_token: str | None) -> str:
    """Generic-prompt output JSON carrying the record's ground truth, using
    the prompt's conventions: "Null" strings for absent values and string
    maxResults."""
    body: dict = {
        "type": widget_type_token if widget_type_token is not None else NULL_TOKEN,
        "metric": record.gt_metric if record.gt_metric is not None else NULL_TOKEN,
        "aggregation": record.gt_aggregation if record.gt_aggregation is not None else NULL_TOKEN,
        "filter": dict(record.gt_filter),
    }
    if record.gt_grouping is not None:
        body["grouping"] = {
            "groupbyTag": record.gt_grouping["groupbyTag"],
            "direction": record.gt_grouping["direction"],
            "maxResults": str(record.gt_grouping["maxResults"]),
        }
    return json.dumps(body, indent=2)


def _add_record(
    client: ReplayLLMClient,
    prompts: PromptPack,
    record: EvalRecord,
    pass1_token: str | None,
    pass2_override: str | None = None,
) -> None:
    system1, user1 = prompts.messages_for_widget_type(record.query)
    client.add(system1, user1, pass1_token if pass1_token is not None else NULL_TOKEN)

    # Pass 2 uses the prompt keyed to the pass-1 token, exactly as the
    # parser will request it.
    normalized = None if pass1_token in (None, NULL_TOKEN) else pass1_token
    canonical = normalize_widget_type(normalized) if normalized else None
    system2, user2 = prompts.messages_for_datasource(canonical, record.query)
    if pass2_override is not None:
        response2 = pass2_override
    elif canonical == "slo2":
        response2 = json.dumps({"name": record.slo_name or NULL_TOKEN})
    else:
        response2 = _pass2_response(record, pass1_token)
    client.add(system2, user2, response2)


def build_oracle_fixture(records: list[EvalRecord], prompts: PromptPack, path) -> ReplayLLMClient:
    """Fixture whose responses equal ground truth for every record."""
    client = ReplayLLMClient()
    for record in records:
        _add_record(client, prompts, record, record.gt_widget_type)
    client.save(path)
    return client


_TYPE_CORRUPTION = {
    None: "pie",
    "slo2": "pie",
    "bigNumber": "pie",
    "pie": "bigNumber",
    "topList": "TIME_SERIES",
}


def _corrupt_type_token(record: EvalRecord) -> str:
    token = record.gt_widget_type
    if token in ("time_series", "TIME_SERIES"):
        return "topList" if record.gt_grouping is not None else "bigNumber"
    return _TYPE_CORRUPTION[token]


def build_corrupt_widget_type_fixture(
    records: list[EvalRecord], prompts: PromptPack, path
) -> ReplayLLMClient:
    """Every record's widget type is wrong; all other fields match ground
    truth, so per-field accuracy isolates the type column."""
    client = ReplayLLMClient()
    for record in records:
        wrong = _corrupt_type_token(record)
        if record.gt_widget_type == "slo2":
            # The wrong pass-1 token routes pass 2 to the generic prompt;
            # an all-Null body keeps the other four fields correct.
            override = json.dumps(
                {"type": wrong, "metric": NULL_TOKEN, "aggregation": NULL_TOKEN, "filter": {}}
            )
            _add_record(client, prompts, record, wrong, pass2_override=override)
        else:
            _add_record(client, prompts, record, wrong)
    client.save(path)
    return client


def build_corrupt_grouping_fixture(
    records: list[EvalRecord], prompts: PromptPack, path, wrong_count: int = 17
) -> ReplayLLMClient:
    """The first ``wrong_count`` grouping-required records (in dataset
    order) get a wrong groupbyTag; everything else matches ground truth."""
    client = ReplayLLMClient()
    corrupted = 0
    for record in records:
        if record.gt_grouping is not None and corrupted < wrong_count:
            tag = record.gt_grouping["groupbyTag"]
            wrong_tag = GROUPING_TAGS[(GROUPING_TAGS.index(tag) + 1) % len(GROUPING_TAGS)]
            body = json.loads(_pass2_response(record, record.gt_widget_type))
            body["grouping"]["groupbyTag"] = wrong_tag
            _add_record(
                client,
                prompts,
                record,
                record.gt_widget_type,
                pass2_override=json.dumps(body, indent=2),
            )
            corrupted += 1
        else:
            _add_record(client, prompts, record, record.gt_widget_type)
    client.save(path)
    return client
