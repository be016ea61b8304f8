from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from widgetforge.catalog import EntityCatalog, KnowledgeBase
from widgetforge.evaluation.replayfix import build_oracle_fixture
from widgetforge.prompts import build_prompts
from widgetforge.resolver import TrigramSimilarity
from widgetforge.vocabulary import load_global_vocabulary

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
GOLDEN_DATASET = TESTS_DIR / "fixtures" / "golden20.jsonl"
GOLDEN_REPLAY = TESTS_DIR / "fixtures" / "golden20_replay.json"

# Entity pools shared by resolver scenarios, session flows, and the mock API.
SERVICES = (
    "appdata-reader",
    "appdata-writer",
    "catalogue",
    "payment",
    "qotd-web service",
    "ratings",
    "robot-shop catalogue service",
    "robot-shop shipping service",
)
APPLICATIONS = ("Robot Shop", "qotd irl")
ENDPOINTS = ("GET /images", "POST /login")
SLO_CONFIGS = ("Great Expectations", "checkout-availability")


@pytest.fixture(scope="session")
def vocab():
    return load_global_vocabulary()


@pytest.fixture(scope="session")
def prompts(vocab):
    return build_prompts(vocab)


@pytest.fixture(scope="session")
def catalog():
    return EntityCatalog(
        services=frozenset(SERVICES),
        applications=frozenset(APPLICATIONS),
        endpoints=frozenset(ENDPOINTS),
        slo_configs=frozenset(SLO_CONFIGS),
        fetched_at=1.0,
        source_instance="test-fixture",
    )


@pytest.fixture
def kb(vocab, catalog):
    return KnowledgeBase.from_catalog(vocab, catalog)


@pytest.fixture(scope="session")
def matcher06():
    return TrigramSimilarity(threshold=0.6)


@pytest.fixture(scope="session")
def matcher08():
    return TrigramSimilarity(threshold=0.8)


@pytest.fixture(scope="session")
def dataset_path(vocab):
    import widgetforge.evaluation.harness as harness

    return str(Path(harness.__file__).parent.parent / "data" / "eval_dataset.jsonl")


@pytest.fixture(scope="session")
def dataset_records(dataset_path, vocab):
    from widgetforge.evaluation.records import load_dataset

    return load_dataset(dataset_path, vocab)


@pytest.fixture(scope="session")
def oracle_replay_path(tmp_path_factory, dataset_records, prompts):
    path = tmp_path_factory.mktemp("replay") / "oracle_replay.json"
    build_oracle_fixture(dataset_records, prompts, path)
    return str(path)


@pytest.fixture(scope="session")
def mock_fixtures():
    return {
        "services": [{"name": s} for s in SERVICES],
        "applications": [{"name": a} for a in APPLICATIONS],
        "endpoints": [{"name": e} for e in ENDPOINTS],
        "slo-configs": [{"name": s} for s in SLO_CONFIGS],
    }
