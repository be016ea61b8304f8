from __future__ import annotations

import random

import pytest

from oracles import FROZEN_SIMILARITIES, oracle_resolve_status, oracle_trigram_similarity
from widgetforge.errors import DomainUnavailableError, NoOptionsError
from widgetforge.parsing import ExtractionResult, GroupingSpec
from widgetforge.resolver import (
    AMBIGUOUS,
    AUTO_CORRECTED,
    CANDIDATE_CAP,
    DEFAULT_THRESHOLD,
    EXACT,
    MISSING,
    UNRESOLVABLE,
    TrigramSimilarity,
    completion_options,
    resolve_extraction,
    resolve_field,
)


def test_default_threshold():
    assert DEFAULT_THRESHOLD == 0.8


def test_frozen_similarity_pins(matcher06):
    for (a, b), expected in FROZEN_SIMILARITIES.items():
        assert matcher06.similarity(a, b) == expected


def test_similarity_matches_oracle_on_random_strings():
    rng = random.Random(7)
    alphabet = "abcdefgh -"
    matcher = TrigramSimilarity(threshold=0.8)
    for _ in range(500):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 18)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 18)))
        assert matcher.similarity(a, b) == oracle_trigram_similarity(a, b)


def test_similarity_identity_and_case_folding(matcher08):
    assert matcher08.similarity("Catalogue", "catalogue") == 1.0
    assert matcher08.similarity("a  b", "a b") == 1.0
    assert matcher08.similarity("", "") == 0.0
    assert matcher08.similarity("ab", "ab") == 1.0
    assert matcher08.similarity("ab", "cd") == 0.0


def test_similarity_is_symmetric(matcher08):
    pairs = [("qotd-service", "qotd-web service"), ("abc", "abcd"), ("x", "xy")]
    for a, b in pairs:
        assert matcher08.similarity(a, b) == matcher08.similarity(b, a)


def test_threshold_validation():
    with pytest.raises(ValueError):
        TrigramSimilarity(threshold=0.0)
    with pytest.raises(ValueError):
        TrigramSimilarity(threshold=1.5)


def test_resolve_field_exact(matcher06):
    outcome = resolve_field("catalogue", {"catalogue", "payment"}, "filter.service.name", matcher06)
    assert outcome.status == EXACT
    assert outcome.resolved_value == "catalogue"
    assert outcome.score == 1.0


def test_resolve_field_missing(matcher06):
    outcome = resolve_field(None, {"catalogue"}, "filter.service.name", matcher06)
    assert outcome.status == MISSING
    assert outcome.resolved_value is None


def test_resolve_field_empty_domain_raises(matcher06):
    with pytest.raises(DomainUnavailableError):
        resolve_field("x", set(), "filter.service.name", matcher06)


def test_scenario_auto_correction(matcher06, catalog):
    """A misremembered service name with one above-threshold candidate."""
    outcome = resolve_field("qotd-service", catalog.services, "filter.service.name", matcher06)
    assert outcome.status == AUTO_CORRECTED
    assert outcome.resolved_value == "qotd-web service"
    assert outcome.score == FROZEN_SIMILARITIES[("qotd-service", "qotd-web service")]


def test_scenario_two_candidate_disambiguation(matcher06, catalog):
    """An underspecified name matching two catalog entries above threshold."""
    outcome = resolve_field("robot-shop service", catalog.services, "filter.service.name", matcher06)
    assert outcome.status == AMBIGUOUS
    assert outcome.candidates == (
        ("robot-shop shipping service", FROZEN_SIMILARITIES[("robot-shop service", "robot-shop shipping service")]),
        ("robot-shop catalogue service", FROZEN_SIMILARITIES[("robot-shop service", "robot-shop catalogue service")]),
    )


def test_scenario_missing_aggregation_options(vocab):
    """A query omitting the aggregation yields the legal set for its metric."""
    partial = ExtractionResult(widget_type="TIME_SERIES", metric="latency")
    options = completion_options("aggregation", partial, vocab)
    assert "MEAN" in options.allowed_values
    assert "P95" in options.allowed_values
    assert set(options.allowed_values) == set(vocab.aggregations_for("latency"))
    assert "latency" in options.context_note


def test_threshold_boundary_is_inclusive(catalog):
    """score == threshold counts as a candidate (>= comparison)."""
    matcher = TrigramSimilarity(threshold=0.8)
    sim = matcher.similarity("robot-shop service", "robot-shop shipping service")
    assert sim == 0.8
    domain = {"robot-shop shipping service", "unrelated thing"}
    outcome = resolve_field("robot-shop service", domain, "filter.service.name", matcher)
    assert outcome.status == AUTO_CORRECTED
    assert outcome.resolved_value == "robot-shop shipping service"


def test_tie_breaks_lexicographically(matcher06):
    domain = {"appdata-writer", "appdata-reader"}
    outcome = resolve_field("appdata", domain, "filter.service.name", matcher06)
    assert outcome.status == AMBIGUOUS
    names = [c for c, _ in outcome.candidates]
    assert names == ["appdata-reader", "appdata-writer"]
    scores = [s for _, s in outcome.candidates]
    assert scores[0] == scores[1] == FROZEN_SIMILARITIES[("appdata", "appdata-writer")]


def test_candidates_capped_at_ten_full_list_retained():
    matcher = TrigramSimilarity(threshold=0.6)
    domain = {f"api gateway node {i:02d}" for i in range(15)}
    outcome = resolve_field("api gateway node", domain, "filter.service.name", matcher)
    assert outcome.status == AMBIGUOUS
    assert len(outcome.candidates) == CANDIDATE_CAP == 10
    assert len(outcome.candidates_all) == 15
    assert list(outcome.candidates) == list(outcome.candidates_all[:10])


def test_trichotomy_matches_brute_force_oracle():
    """1,000 randomized cases across thresholds agree with the oracle."""
    rng = random.Random(20250817)
    alphabet = "abcdefghij -"

    def word():
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 14)))

    agreements = 0
    for case in range(1000):
        threshold = rng.choice((0.6, 0.8, 0.9))
        matcher = TrigramSimilarity(threshold=threshold)
        domain = {word() for _ in range(rng.randint(1, 50))}
        roll = rng.random()
        if roll < 0.1:
            value = None
        elif roll < 0.3:
            value = rng.choice(sorted(domain))
        elif roll < 0.65:
            base = rng.choice(sorted(domain))
            cut = rng.randint(0, len(base))
            value = base[:cut] + word()[: rng.randint(0, 6)] + base[cut:]
            value = value or word()
        else:
            value = word()

        outcome = resolve_field(value, domain, "filter.service.name", matcher)
        expected = oracle_resolve_status(value, domain, threshold)
        assert outcome.status == expected["status"], (value, sorted(domain), threshold)
        if expected["status"] in (EXACT, AUTO_CORRECTED):
            assert outcome.resolved_value == expected["resolved"]
        if expected["status"] == AMBIGUOUS:
            assert list(outcome.candidates_all) == expected["candidates"]
        agreements += 1
    assert agreements == 1000


def test_completion_options_widget_type(vocab):
    options = completion_options("widget_type", ExtractionResult(), vocab)
    assert set(options.allowed_values) == {"bigNumber", "TIME_SERIES", "pie", "slo2", "topList"}


def test_completion_options_grouping_fields(vocab):
    tag = completion_options("grouping.group_by_tag", ExtractionResult(), vocab)
    assert "endpoint.name" in tag.allowed_values
    direction = completion_options("grouping.direction", ExtractionResult(), vocab)
    assert direction.allowed_values == ("ASC", "DESC")
    max_results = completion_options("grouping.max_results", ExtractionResult(), vocab)
    assert max_results.allowed_values == ("5", "10", "20", "50")


def test_completion_options_entity_filter_needs_catalog(vocab, catalog):
    with pytest.raises(NoOptionsError):
        completion_options("filter.service.name", ExtractionResult(), vocab, catalog=None)
    options = completion_options("filter.service.name", ExtractionResult(), vocab, catalog=catalog)
    assert options.allowed_values == tuple(sorted(catalog.services))


def test_completion_options_call_fields(vocab):
    call_type = completion_options("filter.call.type", ExtractionResult(), vocab)
    assert "HTTP" in call_type.allowed_values
    erroneous = completion_options("filter.call.erroneous", ExtractionResult(), vocab)
    assert erroneous.allowed_values == ("true", "false")


def test_completion_options_slo(vocab, catalog):
    options = completion_options("slo_name", ExtractionResult(widget_type="slo2"), vocab, catalog=catalog)
    assert options.allowed_values == tuple(sorted(catalog.slo_configs))


def test_completion_options_unknown_field(vocab):
    with pytest.raises(NoOptionsError):
        completion_options("filter.widget.color", ExtractionResult(), vocab)


def test_resolve_extraction_substitutes_auto_corrections(vocab, kb, matcher06):
    raw = ExtractionResult(
        widget_type="TIME_SERIES",
        metric="latency",
        aggregation="MEAN",
        filter={"service.name": "qotd-service"},
    )
    resolved, outcomes = resolve_extraction(raw, kb, matcher06)
    assert resolved.filter == {"service.name": "qotd-web service"}
    by_field = {o.field_path: o for o in outcomes}
    assert by_field["filter.service.name"].status == AUTO_CORRECTED


def test_resolve_extraction_exact_passthrough_keys(vocab, kb, matcher06):
    raw = ExtractionResult(
        widget_type="pie",
        metric="calls",
        aggregation="SUM",
        filter={"call.type": "HTTP", "call.erroneous": "true"},
    )
    resolved, outcomes = resolve_extraction(raw, kb, matcher06)
    assert resolved.filter == {"call.type": "HTTP", "call.erroneous": "true"}
    statuses = {o.field_path: o.status for o in outcomes}
    assert statuses["filter.call.type"] == EXACT
    assert statuses["filter.call.erroneous"] == EXACT


def test_resolve_extraction_partial_grouping_missing_only_for_toplist(vocab, kb, matcher06):
    partial = GroupingSpec(group_by_tag="service.name", direction=None, max_results=None)
    toplist = ExtractionResult(widget_type="topList", metric="calls", aggregation="SUM", grouping=partial)
    _, outcomes = resolve_extraction(toplist, kb, matcher06)
    missing_fields = {o.field_path for o in outcomes if o.status == MISSING}
    assert missing_fields == {"grouping.direction", "grouping.max_results"}

    series = ExtractionResult(widget_type="TIME_SERIES", metric="calls", aggregation="SUM", grouping=partial)
    _, outcomes = resolve_extraction(series, kb, matcher06)
    missing_fields = {o.field_path for o in outcomes if o.status == MISSING}
    assert not any(f.startswith("grouping.") for f in missing_fields)


def test_resolve_extraction_slo_name_fuzzy(vocab, kb, matcher06):
    raw = ExtractionResult(widget_type="slo2", slo_name="great expectations")
    resolved, outcomes = resolve_extraction(raw, kb, matcher06)
    assert resolved.slo_name == "Great Expectations"
    by_field = {o.field_path: o for o in outcomes}
    assert by_field["slo_name"].status == AUTO_CORRECTED


def test_resolve_extraction_unresolvable_keeps_raw_value(vocab, kb, matcher06):
    raw = ExtractionResult(
        widget_type="pie",
        metric="calls",
        aggregation="SUM",
        filter={"service.name": "zzz-no-such"},
    )
    resolved, outcomes = resolve_extraction(raw, kb, matcher06)
    assert resolved.filter == {"service.name": "zzz-no-such"}
    by_field = {o.field_path: o for o in outcomes}
    assert by_field["filter.service.name"].status == UNRESOLVABLE
