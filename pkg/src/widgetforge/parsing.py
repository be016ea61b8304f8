"""Two-pass extraction: widget-type inference, then format-tailored
data-source extraction, plus the tolerant JSON deserialization layer.

Null handling follows the prompt contract: the literal strings "Null" and
"None" (any casing) map to the missing sentinel (Python None); filter keys
absent from the model output are omissions, never Null-filled.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace

from .errors import FieldValidationError, ParseError
from .llm import CompletionRequest
from .prompts import REPROMPT_INSTRUCTION, PromptPack
from .vocabulary import (
    CALL_TYPES,
    DIRECTIONS,
    GROUPING_TAGS,
    MAX_RESULTS_OPTIONS,
    WIDGET_TYPES,
    GlobalVocabulary,
)

log = logging.getLogger(__name__)

# Widget types that may carry a grouping criterion. Grouping on any other
# concrete type violates the output rules and is rejected, not dropped.
GROUPABLE_TYPES = ("TIME_SERIES", "topList")

_NULL_STRINGS = frozenset({"null", "none"})

_WIDGET_TYPE_BY_FOLD = {t.casefold(): t for t in WIDGET_TYPES}
# The evaluation dataset writes time_series; prompts write TIME_SERIES.
_WIDGET_TYPE_BY_FOLD["time_series"] = "TIME_SERIES"

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def is_null_token(value) -> bool:
    return isinstance(value, str) and value.strip().casefold() in _NULL_STRINGS


def normalize_widget_type(text) -> str | None:
    """Map model output to a canonical widget-type token, or None for Null.

    Matching is case-insensitive after whitespace trim; anything that does
    not match a known token is treated as Null rather than an error, since
    the first pass must never abort the conversation.
    """
    if text is None:
        return None
    token = str(text).strip()
    if not token or is_null_token(token):
        return None
    return _WIDGET_TYPE_BY_FOLD.get(token.casefold())


@dataclass(frozen=True)
class GroupingSpec:
    group_by_tag: str | None = None
    direction: str | None = None
    max_results: int | None = None

    def is_empty(self) -> bool:
        return self.group_by_tag is None and self.direction is None and self.max_results is None


@dataclass
class ExtractionResult:
    """The raw five-field parse. None encodes the Null sentinel throughout.

    grouping is None when absent entirely; slo_name is meaningful only for
    slo2 (None everywhere else).
    """

    widget_type: str | None = None
    metric: str | None = None
    aggregation: str | None = None
    filter: dict[str, str] = field(default_factory=dict)
    grouping: GroupingSpec | None = None
    slo_name: str | None = None


def _strip_to_json(text: str) -> str:
    """Remove code fences and surrounding prose, keeping the JSON object."""
    fenced = _FENCE_RE.search(text)
    if fenced:
        text = fenced.group(1)
    start = text.find("{")
    end = text.rfind("}")
    if start == -1 or end == -1 or end < start:
        raise ParseError("no JSON object found in model output", raw_text=text)
    return text[start:end + 1]


def _parse_max_results(value) -> int | None:
    if value is None or is_null_token(value):
        return None
    try:
        number = int(str(value).strip())
    except ValueError:
        raise FieldValidationError("grouping.maxResults", value, f"maxResults {value!r} is not an integer")
    if number not in MAX_RESULTS_OPTIONS:
        raise FieldValidationError("grouping.maxResults", number)
    return number


def _parse_grouping(obj) -> GroupingSpec | None:
    if obj is None or is_null_token(obj):
        return None
    if not isinstance(obj, dict):
        raise FieldValidationError("grouping", obj, "grouping must be a JSON object")
    allowed = {"groupbyTag", "groupByTag", "direction", "maxResults"}
    unknown = set(obj) - allowed
    if unknown:
        raise FieldValidationError("grouping", sorted(unknown), f"unknown grouping keys {sorted(unknown)}")
    if "groupbyTag" in obj and "groupByTag" in obj:
        raise FieldValidationError("grouping", obj, "both groupbyTag and groupByTag present")

    tag = obj.get("groupbyTag", obj.get("groupByTag"))
    if tag is None or is_null_token(tag):
        tag = None
    elif tag not in GROUPING_TAGS:
        raise FieldValidationError("grouping.groupbyTag", tag)

    direction = obj.get("direction")
    if direction is None or is_null_token(direction):
        direction = None
    else:
        direction = str(direction).strip().upper()
        if direction not in DIRECTIONS:
            raise FieldValidationError("grouping.direction", obj.get("direction"))

    spec = GroupingSpec(group_by_tag=tag, direction=direction, max_results=_parse_max_results(obj.get("maxResults")))
    return spec


def _parse_filter(obj, vocab: GlobalVocabulary) -> dict[str, str]:
    if obj is None or is_null_token(obj):
        return {}
    if not isinstance(obj, dict):
        raise FieldValidationError("filter", obj, "filter must be a JSON object")
    parsed: dict[str, str] = {}
    for key, value in obj.items():
        if key not in vocab.filter_keys:
            raise FieldValidationError(f"filter.{key}", value, f"unknown filter key {key!r}")
        if value is None or is_null_token(value):
            continue
        value = str(value)
        if not value:
            continue
        if key == "call.type" and value not in vocab.call_types:
            raise FieldValidationError("filter.call.type", value)
        if key == "call.erroneous":
            folded = value.strip().lower()
            if folded not in ("true", "false"):
                raise FieldValidationError("filter.call.erroneous", value)
            value = folded
        parsed[key] = value
    return parsed


def apply_structure(result: ExtractionResult) -> ExtractionResult:
    """Enforce the grouping placement rules on a parsed result.

    topList gets an all-Null grouping inserted when the model omitted one;
    an entirely-Null grouping on TIME_SERIES collapses to absent; grouping
    on bigNumber or pie is a hard violation.
    """
    wt = result.widget_type
    if result.grouping is not None and wt not in GROUPABLE_TYPES and wt is not None:
        raise FieldValidationError("grouping", wt, f"grouping is not allowed for widget type {wt!r}")
    if wt == "topList" and result.grouping is None:
        return replace_grouping(result, GroupingSpec())
    if wt == "TIME_SERIES" and result.grouping is not None and result.grouping.is_empty():
        return replace_grouping(result, None)
    return result


def replace_grouping(result: ExtractionResult, grouping: GroupingSpec | None) -> ExtractionResult:
    return ExtractionResult(
        widget_type=result.widget_type,
        metric=result.metric,
        aggregation=result.aggregation,
        filter=dict(result.filter),
        grouping=grouping,
        slo_name=result.slo_name,
    )


def parse_model_json(text: str, widget_type: str | None, vocab: GlobalVocabulary) -> ExtractionResult:
    """Deserialize raw model output into an ExtractionResult.

    ``widget_type`` is the first-pass token and selects the expected output
    shape (the SLO prompt returns {"name": ...}); the result's own type
    field comes from the JSON where the generic shape is used.
    """
    if widget_type == "slo2":
        stripped = text.strip()
        if is_null_token(stripped):
            return ExtractionResult(widget_type="slo2")
        try:
            obj = json.loads(_strip_to_json(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"SLO output is not valid JSON: {exc}", raw_text=text) from exc
        if not isinstance(obj, dict):
            raise ParseError("SLO output is not a JSON object", raw_text=text)
        unknown = set(obj) - {"name"}
        if unknown:
            raise FieldValidationError("slo", sorted(unknown), f"unknown SLO output keys {sorted(unknown)}")
        name = obj.get("name")
        if name is None or is_null_token(name):
            return ExtractionResult(widget_type="slo2")
        return ExtractionResult(widget_type="slo2", slo_name=str(name))

    try:
        obj = json.loads(_strip_to_json(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"model output is not valid JSON: {exc}", raw_text=text) from exc
    if not isinstance(obj, dict):
        raise ParseError("model output is not a JSON object", raw_text=text)

    allowed = {"type", "metric", "aggregation", "filter", "grouping"}
    unknown = set(obj) - allowed
    if unknown:
        raise FieldValidationError("(root)", sorted(unknown), f"unknown output keys {sorted(unknown)}")

    raw_type = obj.get("type")
    parsed_type = normalize_widget_type(raw_type)
    if parsed_type is None and raw_type is not None and not is_null_token(raw_type) and str(raw_type).strip():
        raise FieldValidationError("type", raw_type)

    metric = obj.get("metric")
    if metric is None or is_null_token(metric):
        metric = None
    elif metric not in vocab.metrics:
        raise FieldValidationError("metric", metric)

    aggregation = obj.get("aggregation")
    if aggregation is None or is_null_token(aggregation):
        aggregation = None
    elif aggregation not in vocab.aggregations_for(None):
        raise FieldValidationError("aggregation", aggregation)

    result = ExtractionResult(
        widget_type=parsed_type,
        metric=metric,
        aggregation=aggregation,
        filter=_parse_filter(obj.get("filter"), vocab),
        grouping=_parse_grouping(obj.get("grouping")),
    )
    return apply_structure(result)


def serialize_extraction(result: ExtractionResult) -> str:
    """Render a result back into the model output shape (Null strings,
    canonical groupbyTag key). parse_model_json inverts this exactly."""
    if result.widget_type == "slo2":
        return json.dumps({"name": result.slo_name if result.slo_name is not None else "Null"})
    doc: dict = {
        "type": result.widget_type if result.widget_type is not None else "Null",
        "metric": result.metric if result.metric is not None else "Null",
        "aggregation": result.aggregation if result.aggregation is not None else "Null",
        "filter": dict(result.filter),
    }
    if result.grouping is not None:
        g = result.grouping
        doc["grouping"] = {
            "groupbyTag": g.group_by_tag if g.group_by_tag is not None else "Null",
            "direction": g.direction if g.direction is not None else "Null",
            "maxResults": g.max_results if g.max_results is not None else "Null",
        }
    return json.dumps(doc, indent=4)


def infer_widget_type(query: str, prompts: PromptPack, client) -> str | None:
    """First pass. Returns a canonical token or None for Null."""
    if not query or not query.strip():
        raise ValueError("query must be non-empty")
    system, user = prompts.messages_for_widget_type(query)
    response = client.complete(CompletionRequest(system_prompt=system, user_message=user))
    return normalize_widget_type(response.text)


def extract_data_sources(
    query: str,
    widget_type: str | None,
    prompts: PromptPack,
    client,
    vocab: GlobalVocabulary,
) -> ExtractionResult:
    """Second pass: extract the data-source fields with the prompt shaped
    for the first-pass widget type, then reconcile the two passes.

    A concrete first-pass type always wins over a differing second-pass
    type (the discrepancy is logged); a Null first pass adopts whatever
    the second pass produced. Unparseable output earns exactly one
    reprompt before the parse error propagates.
    """
    system, user = prompts.messages_for_datasource(widget_type, query)
    response = client.complete(CompletionRequest(system_prompt=system, user_message=user))
    try:
        result = parse_model_json(response.text, widget_type, vocab)
    except ParseError:
        log.info("unparseable extraction for %r, reprompting once", query)
        retry_user = f"{user}\n{REPROMPT_INSTRUCTION}"
        retry = client.complete(CompletionRequest(system_prompt=system, user_message=retry_user))
        result = parse_model_json(retry.text, widget_type, vocab)

    if widget_type is not None and widget_type != "slo2":
        if result.widget_type is not None and result.widget_type != widget_type:
            log.info(
                "pass disagreement for %r: first pass %s, second pass %s; keeping first",
                query, widget_type, result.widget_type,
            )
        result.widget_type = widget_type
        result = apply_structure(result)
    return result
