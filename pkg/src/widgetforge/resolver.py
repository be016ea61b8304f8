"""Fuzzy resolution of extracted values against the knowledge base.

Similarity is cosine over character-trigram term-frequency vectors of
lowercased, whitespace-normalized strings; an optional embedding-backed
provider delegates to a vector endpoint and falls back to trigrams when
that endpoint misbehaves. Resolution is a pure function of the catalog
snapshot, so outcomes are stable for the lifetime of a snapshot.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass

import requests

from .catalog import KnowledgeBase
from .errors import DomainUnavailableError, NoOptionsError
from .parsing import ExtractionResult
from .vocabulary import ENTITY_FILTER_KEYS, WIDGET_TYPES, GlobalVocabulary

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.80

# Candidate lists shown to the user are capped; the untruncated list stays
# on the outcome for programmatic consumers.
CANDIDATE_CAP = 10

EXACT = "exact"
AUTO_CORRECTED = "auto_corrected"
AMBIGUOUS = "ambiguous"
MISSING = "missing"
UNRESOLVABLE = "unresolvable"

_ENTITY_DOMAINS = {
    "service.name": "services",
    "application.name": "applications",
    "endpoint.name": "endpoints",
}


def normalize_text(value: str) -> str:
    return " ".join(value.lower().split())


def trigram_counts(value: str) -> Counter:
    if len(value) < 3:
        return Counter([value])
    counts: Counter = Counter()
    for i in range(len(value) - 2):
        counts[value[i:i + 3]] += 1
    return counts


class TrigramSimilarity:
    """Deterministic character-trigram TF cosine. No external dependency."""

    kind = "character-ngram"

    def __init__(self, threshold: float = DEFAULT_THRESHOLD):
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.threshold = threshold

    def similarity(self, a: str, b: str) -> float:
        na, nb = normalize_text(a), normalize_text(b)
        if na == nb:
            return 1.0 if na else 0.0
        if not na or not nb:
            return 0.0
        ga, gb = trigram_counts(na), trigram_counts(nb)
        dot = sum(count * gb[gram] for gram, count in ga.items())
        magnitude = math.sqrt(sum(v * v for v in ga.values())) * math.sqrt(sum(v * v for v in gb.values()))
        return dot / magnitude if magnitude else 0.0


class EmbeddingSimilarity:
    """Cosine over vectors from an external embedding endpoint.

    Endpoint failures degrade to the trigram provider with a logged
    warning instead of breaking resolution.
    """

    kind = "embedding-backed"

    def __init__(
        self,
        embed_url: str,
        threshold: float = DEFAULT_THRESHOLD,
        timeout: float = 10.0,
        fallback: TrigramSimilarity | None = None,
    ):
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.embed_url = embed_url.rstrip("/")
        self.threshold = threshold
        self.timeout = timeout
        self.fallback = fallback or TrigramSimilarity(threshold)
        self._session = requests.Session()

    def similarity(self, a: str, b: str) -> float:
        if normalize_text(a) == normalize_text(b):
            return 1.0 if normalize_text(a) else 0.0
        try:
            resp = self._session.post(f"{self.embed_url}/embed", json={"texts": [a, b]}, timeout=self.timeout)
            resp.raise_for_status()
            va, vb = resp.json()["vectors"]
        except (requests.RequestException, KeyError, ValueError, TypeError) as exc:
            log.warning("embedding endpoint failed (%s); falling back to trigram similarity", exc)
            return self.fallback.similarity(a, b)
        dot = sum(x * y for x, y in zip(va, vb))
        magnitude = math.sqrt(sum(x * x for x in va)) * math.sqrt(sum(y * y for y in vb))
        score = dot / magnitude if magnitude else 0.0
        # Clamp: embedding backends may return vectors whose cosine drifts
        # slightly outside [0, 1].
        return min(1.0, max(0.0, score))


@dataclass(frozen=True)
class MatchOutcome:
    status: str
    field_path: str
    resolved_value: str | None = None
    score: float | None = None
    candidates: tuple[tuple[str, float], ...] | None = None
    candidates_all: tuple[tuple[str, float], ...] | None = None


@dataclass(frozen=True)
class CompletionOptions:
    field_path: str
    allowed_values: tuple[str, ...]
    context_note: str


def resolve_field(value: str | None, candidates_domain, field_path: str, provider) -> MatchOutcome:
    """Classify one extracted value against its candidate domain.

    Literal membership short-circuits as exact (score 1.0). Otherwise the
    number of domain entries scoring at or above the provider threshold
    decides: one is an auto-correction, two or more are ambiguous with the
    candidates sorted by score descending (ties lexicographic), zero is
    unresolvable. A Null source value is a missing element.
    """
    domain = set(candidates_domain)
    if not domain:
        raise DomainUnavailableError(field_path)
    if value is None:
        return MatchOutcome(status=MISSING, field_path=field_path)
    if value in domain:
        return MatchOutcome(status=EXACT, field_path=field_path, resolved_value=value, score=1.0)

    scored = sorted(
        ((candidate, provider.similarity(value, candidate)) for candidate in domain),
        key=lambda pair: (-pair[1], pair[0]),
    )
    above = tuple((c, s) for c, s in scored if s >= provider.threshold)
    if len(above) == 1:
        winner, score = above[0]
        return MatchOutcome(status=AUTO_CORRECTED, field_path=field_path, resolved_value=winner, score=score)
    if len(above) >= 2:
        return MatchOutcome(
            status=AMBIGUOUS,
            field_path=field_path,
            candidates=above[:CANDIDATE_CAP],
            candidates_all=above,
        )
    return MatchOutcome(status=UNRESOLVABLE, field_path=field_path)


def completion_options(
    field_path: str,
    partial: ExtractionResult,
    vocab: GlobalVocabulary,
    catalog=None,
) -> CompletionOptions:
    """Context-restricted allowed values for a missing element."""
    if field_path == "widget_type":
        return CompletionOptions(field_path, WIDGET_TYPES, "Pick the widget type to create.")
    if field_path == "metric":
        return CompletionOptions(field_path, vocab.metric_names, "Pick the metric to display.")
    if field_path == "aggregation":
        if partial.metric is not None:
            note = f"Aggregations available for the {partial.metric} metric."
        else:
            note = "Any aggregation (no metric chosen yet)."
        return CompletionOptions(field_path, vocab.aggregations_for(partial.metric), note)
    if field_path == "grouping.group_by_tag":
        return CompletionOptions(field_path, vocab.grouping_tags, "Pick the tag to group results by.")
    if field_path == "grouping.direction":
        return CompletionOptions(field_path, vocab.directions, "Sort direction for the grouped results.")
    if field_path == "grouping.max_results":
        return CompletionOptions(
            field_path,
            tuple(str(n) for n in vocab.max_results_options),
            "How many results to keep.",
        )
    if field_path == "filter.call.type":
        return CompletionOptions(field_path, vocab.call_types, "Pick the call type to filter on.")
    if field_path == "filter.call.erroneous":
        return CompletionOptions(field_path, ("true", "false"), "Restrict to erroneous calls?")
    if field_path.startswith("filter."):
        key = field_path[len("filter."):]
        domain_name = _ENTITY_DOMAINS.get(key)
        if domain_name is None or catalog is None:
            raise NoOptionsError(field_path)
        values = tuple(sorted(catalog.domain(domain_name)))
        if not values:
            raise NoOptionsError(field_path)
        return CompletionOptions(field_path, values, f"Known {key} values.")
    if field_path == "slo_name":
        if catalog is None:
            raise NoOptionsError(field_path)
        values = tuple(sorted(catalog.slo_configs))
        if not values:
            raise NoOptionsError(field_path)
        return CompletionOptions(field_path, values, "Known SLO configurations.")
    raise NoOptionsError(field_path)


def _copy(result: ExtractionResult) -> ExtractionResult:
    return ExtractionResult(
        widget_type=result.widget_type,
        metric=result.metric,
        aggregation=result.aggregation,
        filter=dict(result.filter),
        grouping=result.grouping,
        slo_name=result.slo_name,
    )


def resolve_extraction(
    raw: ExtractionResult,
    kb: KnowledgeBase,
    provider,
) -> tuple[ExtractionResult, list[MatchOutcome]]:
    """Resolve every applicable field of a parse, in the fixed field order
    (widget type, metric, aggregation, filter keys alphabetically, grouping
    subfields, SLO name).

    exact and auto_corrected outcomes are substituted into the returned
    draft; ambiguous, missing and unresolvable outcomes are only reported.
    Candidate sets are computed once, here; answering clarifications later
    never re-runs resolution or the LLM.
    """
    draft = _copy(raw)
    outcomes: list[MatchOutcome] = []
    is_slo = raw.widget_type == "slo2"

    if raw.widget_type is None:
        outcomes.append(MatchOutcome(status=MISSING, field_path="widget_type"))
    else:
        outcomes.append(MatchOutcome(status=EXACT, field_path="widget_type", resolved_value=raw.widget_type, score=1.0))

    if not is_slo:
        for field_name in ("metric", "aggregation"):
            value = getattr(raw, field_name)
            if value is None:
                outcomes.append(MatchOutcome(status=MISSING, field_path=field_name))
            else:
                outcomes.append(MatchOutcome(status=EXACT, field_path=field_name, resolved_value=value, score=1.0))

    for key in sorted(raw.filter):
        value = raw.filter[key]
        field_path = f"filter.{key}"
        if key in ENTITY_FILTER_KEYS:
            outcome = resolve_field(value, kb.domain(_ENTITY_DOMAINS[key]), field_path, provider)
            if outcome.status in (EXACT, AUTO_CORRECTED):
                draft.filter[key] = outcome.resolved_value
        else:
            # call.type / call.erroneous were vocabulary-validated at parse
            # time; technology.name is free text with no catalog to check.
            outcome = MatchOutcome(status=EXACT, field_path=field_path, resolved_value=value, score=1.0)
        outcomes.append(outcome)

    if raw.grouping is not None and not is_slo:
        grouping_required = raw.widget_type == "topList"
        for attr, field_path in (
            ("group_by_tag", "grouping.group_by_tag"),
            ("direction", "grouping.direction"),
            ("max_results", "grouping.max_results"),
        ):
            value = getattr(raw.grouping, attr)
            if value is None:
                if grouping_required:
                    outcomes.append(MatchOutcome(status=MISSING, field_path=field_path))
            else:
                outcomes.append(MatchOutcome(status=EXACT, field_path=field_path, resolved_value=str(value), score=1.0))

    if is_slo:
        if raw.slo_name is None:
            outcomes.append(MatchOutcome(status=MISSING, field_path="slo_name"))
        else:
            outcome = resolve_field(raw.slo_name, kb.domain("slo_configs"), "slo_name", provider)
            if outcome.status in (EXACT, AUTO_CORRECTED):
                draft.slo_name = outcome.resolved_value
            outcomes.append(outcome)

    return draft, outcomes
