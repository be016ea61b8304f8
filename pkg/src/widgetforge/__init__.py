"""widgetforge: natural-language dashboard widget generation.

Two-pass LLM semantic parsing, fuzzy entity resolution over a two-tier
knowledge base, multi-turn clarification sessions, canonical widget JSON
construction, an HTTP service, and an evaluation harness.
"""

from .catalog import EntityCatalog, KnowledgeBase, fetch_entity_catalog
from .errors import WidgetForgeError
from .llm import CompletionRequest, CompletionResponse, HttpLLMClient, ReplayLLMClient
from .parsing import ExtractionResult, GroupingSpec, extract_data_sources, infer_widget_type, parse_model_json
from .prompts import PromptPack, build_prompts
from .resolver import (
    CompletionOptions,
    EmbeddingSimilarity,
    MatchOutcome,
    TrigramSimilarity,
    completion_options,
    resolve_extraction,
    resolve_field,
)
from .session import ClarificationRequest, SessionEngine, SessionStore
from .vocabulary import GlobalVocabulary, load_global_vocabulary
from .widgets import (
    DataSource,
    WidgetSpec,
    build_widget_spec,
    data_request_params,
    deserialize_widget,
    serialize_widget,
    validate_widget_json,
)

__version__ = "0.1.0"

__all__ = [
    "ClarificationRequest",
    "CompletionOptions",
    "CompletionRequest",
    "CompletionResponse",
    "DataSource",
    "EmbeddingSimilarity",
    "EntityCatalog",
    "ExtractionResult",
    "GlobalVocabulary",
    "GroupingSpec",
    "HttpLLMClient",
    "KnowledgeBase",
    "MatchOutcome",
    "PromptPack",
    "ReplayLLMClient",
    "SessionEngine",
    "SessionStore",
    "TrigramSimilarity",
    "WidgetForgeError",
    "WidgetSpec",
    "build_prompts",
    "build_widget_spec",
    "completion_options",
    "data_request_params",
    "deserialize_widget",
    "extract_data_sources",
    "fetch_entity_catalog",
    "infer_widget_type",
    "load_global_vocabulary",
    "parse_model_json",
    "resolve_extraction",
    "resolve_field",
    "serialize_widget",
    "validate_widget_json",
]
