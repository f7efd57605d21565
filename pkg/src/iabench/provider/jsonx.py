"""Lenient JSON extraction from raw model output, plus key/kind validation.

``extract_json`` is total: for any input string it either returns a parsed
value or raises a typed error (``JsonParseError`` / ``JsonSchemaError``),
never anything else. Recovery order: direct parse, fenced block, then the
first balanced top-level object or array found by a string-aware scan.
"""

from __future__ import annotations

import json
import re
from typing import Any, Mapping

from iabench.errors import JsonParseError, JsonSchemaError

# Supported value kinds for expected_keys.
STRING = "string"
INTEGER = "integer"
NUMBER = "number"
LIST_OF_STRINGS = "list_of_strings"

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)
_OPEN_TO_CLOSE = {"{": "}", "[": "]"}


def find_balanced(text: str, start: int) -> int | None:
    """Index one past the close bracket matching the opener at ``start``."""
    opener = text[start]
    closer = _OPEN_TO_CLOSE[opener]
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def _scan_candidates(text: str):
    for i, ch in enumerate(text):
        if ch in _OPEN_TO_CLOSE:
            end = find_balanced(text, i)
            if end is not None:
                yield text[i:end]


def _parse_lenient(raw_text: str) -> Any:
    stripped = raw_text.strip()
    try:
        return json.loads(stripped)
    except (json.JSONDecodeError, ValueError, RecursionError):
        pass
    for match in _FENCE_RE.finditer(raw_text):
        try:
            return json.loads(match.group(1).strip())
        except (json.JSONDecodeError, ValueError, RecursionError):
            continue
    for candidate in _scan_candidates(raw_text):
        try:
            return json.loads(candidate)
        except (json.JSONDecodeError, ValueError, RecursionError):
            continue
    raise JsonParseError("no parsable JSON object or array in response", raw_text=raw_text)


def _coerce_integer(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise JsonSchemaError(f"key '{key}': expected integer, got boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise JsonSchemaError(f"key '{key}': expected integer, got {value!r}")


def _coerce_number(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise JsonSchemaError(f"key '{key}': expected number, got boolean")
    if isinstance(value, (int, float)):
        return float(value)
    raise JsonSchemaError(f"key '{key}': expected number, got {value!r}")


def _coerce_string(key: str, value: Any) -> str:
    if isinstance(value, str):
        return value
    raise JsonSchemaError(f"key '{key}': expected string, got {value!r}")


def _coerce_string_list(key: str, value: Any) -> list[str]:
    # Models sometimes quote the whole list; accept a string that parses to one.
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except (json.JSONDecodeError, ValueError, RecursionError):
            raise JsonSchemaError(f"key '{key}': expected list of strings, got a string")
    if isinstance(value, list) and all(isinstance(item, str) for item in value):
        return value
    raise JsonSchemaError(f"key '{key}': expected list of strings, got {value!r}")


_COERCERS = {
    STRING: _coerce_string,
    INTEGER: _coerce_integer,
    NUMBER: _coerce_number,
    LIST_OF_STRINGS: _coerce_string_list,
}


def extract_json(raw_text: str, expected_keys: Mapping[str, str] | None = None) -> Any:
    """Parse the JSON value in ``raw_text`` and validate expected keys.

    ``expected_keys`` maps key names to kinds ("string", "integer", "number",
    "list_of_strings"). Missing keys or wrong kinds raise ``JsonSchemaError``;
    unparsable input raises ``JsonParseError`` carrying the raw text.
    """
    value = _parse_lenient(raw_text)
    if expected_keys is None:
        return value
    if not isinstance(value, dict):
        raise JsonSchemaError(f"expected a JSON object with keys {sorted(expected_keys)}")
    for key, kind in expected_keys.items():
        if key not in value:
            raise JsonSchemaError(f"missing expected key '{key}'")
        value[key] = _COERCERS[kind](key, value[key])
    return value
