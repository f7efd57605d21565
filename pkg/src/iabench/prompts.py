"""Prompt template loading and rendering.

Templates ship as data files with named slots ({question_type}, {topics},
{instruction_language}, ...) and literal JSON braces doubled, so plain
``str.format`` renders them. Slot values are inserted verbatim.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

TEMPLATE_NAMES = (
    "topics_generation",
    "topic_single",
    "evaluation",
    "instructions_generation",
    "instruction_single",
    "instructions_improvement",
    "instructions_difficulty",
    "answer_generation",
    "answer_improvement",
)

# Rendered into the {format_instructions} slot of the generation templates.
DEFAULT_FORMAT_INSTRUCTIONS = "Return only the JSON object, with no extra text"


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise KeyError(f"unknown prompt template '{name}'")
    return (resources.files("iabench") / "data" / "prompts" / f"{name}.txt").read_text(
        encoding="utf-8")


def render_template(name: str, **slots: str) -> str:
    return load_template(name).format(**slots)


def render_json_list(items: list) -> str:
    """Render a slot value as a JSON array (used for {topics}, {instructions})."""
    return json.dumps(items, ensure_ascii=False)
