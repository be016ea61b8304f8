"""Prompt templates for the two extraction passes.

The templates live as text assets in prompt_assets/. They are stored in
their original printed form: role markers frame the system and user
blocks, literal braces are doubled ({{ }}), and the single {} slot in the
trailing "Query: {}" line marks where the user's query goes. Loading
un-doubles the braces and substitutes the vocabulary knowledge block at
the <global_knowledge_base> placeholder; the query slot is resolved
structurally when messages are rendered, never by string formatting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .vocabulary import GlobalVocabulary

KNOWLEDGE_PLACEHOLDER = "<global_knowledge_base>"

# Sent as the user message when the first extraction attempt was not
# parseable JSON. The replay fixture treats it as a distinct message.
REPROMPT_INSTRUCTION = (
    "Your previous response was not valid JSON. "
    "Return only the JSON object in the required format, with no extra text."
)

_SYSTEM_OPEN = re.compile(r"<\|start_role\|>[Ss]ystem<\|end_role\|> ?\n")
_END_OF_TEXT = "<|end_of_text|>"

# Each zero-shot variant cuts the template from its example-block lead-in
# to the end of the system block.
_EXAMPLE_MARKERS = {
    "widget_type": "\nA few examples of queries and their expected outputs are given below\n",
    "generic": "\nHere are some examples:\n",
    "slo": " Some examples are given below:\n",
}


def _load_asset(name: str) -> str:
    return resources.files("widgetforge").joinpath(f"prompt_assets/{name}").read_text("utf-8")


def _undouble_braces(text: str) -> str:
    return text.replace("{{", "{").replace("}}", "}")


def _strip_examples(template: str, marker: str) -> str:
    start = template.find(marker)
    end = template.find(_END_OF_TEXT)
    if start == -1 or end == -1 or start > end:
        return template
    return template[:start] + template[end:]


def system_text(template: str) -> str:
    """The system block of a template, without role markers."""
    m = _SYSTEM_OPEN.match(template)
    if m is None:
        raise ValueError("template does not open with a system role marker")
    return template[m.end():].split(_END_OF_TEXT, 1)[0]


def example_count(template: str) -> int:
    return system_text(template).count("\nUSER:")


@dataclass(frozen=True)
class PromptPack:
    """Processed templates for both passes, plus per-pass message rendering."""

    widget_type_prompt: str
    datasource_prompt_generic: str
    datasource_prompt_slo: str
    few_shot_count: int = 15

    def messages_for_widget_type(self, query: str) -> tuple[str, str]:
        return system_text(self.widget_type_prompt), f"Query: {query}"

    def messages_for_datasource(self, widget_type: str | None, query: str) -> tuple[str, str]:
        template = self.datasource_prompt_slo if widget_type == "slo2" else self.datasource_prompt_generic
        return system_text(template), f"Query: {query}"


def build_prompts(vocab: GlobalVocabulary, few_shot: bool = True) -> PromptPack:
    """Assemble the prompt pack from assets and the loaded vocabulary.

    The widget-type template already embeds its type-descriptions JSON in
    printed form (a test pins it to the vocabulary rendering); the generic
    template carries the placeholder and gets the full knowledge block.
    """
    widget_type = _undouble_braces(_load_asset("widget_type.txt"))
    generic = _undouble_braces(_load_asset("datasource_generic.txt"))
    slo = _undouble_braces(_load_asset("datasource_slo.txt"))

    generic = generic.replace(KNOWLEDGE_PLACEHOLDER, vocab.knowledge_json())

    if not few_shot:
        widget_type = _strip_examples(widget_type, _EXAMPLE_MARKERS["widget_type"])
        generic = _strip_examples(generic, _EXAMPLE_MARKERS["generic"])
        slo = _strip_examples(slo, _EXAMPLE_MARKERS["slo"])

    return PromptPack(
        widget_type_prompt=widget_type,
        datasource_prompt_generic=generic,
        datasource_prompt_slo=slo,
        few_shot_count=15 if few_shot else 0,
    )
