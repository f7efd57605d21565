"""Criteria set loading: built-in rubric files plus user-supplied JSON."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from iabench.core.records import Criterion
from iabench.errors import UsageError

BUILTIN_SETS = ("topic", "instruction", "difficulty", "answer", "meta")

LANGUAGE_SLOT = "{instruction_language}"


def _builtin_text(name: str) -> str:
    return (resources.files("iabench") / "data" / "criteria" / f"{name}.json").read_text(
        encoding="utf-8")


def load_criteria(name_or_path: str, language: str) -> list[Criterion]:
    """Load a criteria set by built-in name or JSON file path.

    Rubric sentences may carry a ``{instruction_language}`` slot; it is
    substituted with ``language`` here so judges see the final wording.
    """
    if name_or_path in BUILTIN_SETS:
        raw = _builtin_text(name_or_path)
    elif Path(name_or_path).exists():
        raw = Path(name_or_path).read_text(encoding="utf-8")
    else:
        raise UsageError(
            f"unknown criteria set '{name_or_path}' (built-ins: {', '.join(BUILTIN_SETS)})")
    entries = json.loads(raw)
    if not isinstance(entries, list) or not entries:
        raise UsageError(f"criteria set '{name_or_path}' must be a non-empty JSON list")
    criteria = []
    for entry in entries:
        criteria.append(Criterion(
            parameters=list(entry["parameters"]),
            criterion_text=str(entry["criterion_text"]).replace(LANGUAGE_SLOT, language),
        ))
    return criteria
