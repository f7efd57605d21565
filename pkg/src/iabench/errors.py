"""Exception taxonomy for the whole package.

The CLI maps ``UsageError`` subtypes to exit code 2 and every other
``IABenchError`` to exit code 1.
"""

from __future__ import annotations


class IABenchError(Exception):
    """Base class for all package errors."""


class UsageError(IABenchError):
    """Invalid user input: bad config values, bad flags, malformed input files."""


class ConfigValidationError(UsageError):
    """A config field failed validation; carries the offending field name."""

    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"invalid config field '{field_name}': {message}")
        self.field_name = field_name


class RunConflictError(UsageError):
    """Run directory already holds a run with a different config hash."""


class SampleSizeError(UsageError):
    """Requested sample size exceeds the available number of records."""


class RecordError(IABenchError):
    """A record failed schema validation during decode."""


class SequencingError(IABenchError):
    """Stage accessed out of the fixed pipeline order."""


class IntegrityError(IABenchError):
    """Stage file missing or corrupt; carries the first malformed line number."""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)
        self.line_number = line_number


class ProviderError(IABenchError):
    """Base class for provider failures."""


class TransportError(ProviderError):
    """HTTP transport failed after exhausting retries."""


class CredentialError(ProviderError):
    """Authentication rejected; never retried."""


class JsonParseError(ProviderError):
    """No parsable JSON value in a model response; carries the raw text."""

    def __init__(self, message: str, raw_text: str = "") -> None:
        super().__init__(message)
        self.raw_text = raw_text


class JsonSchemaError(ProviderError):
    """Parsed JSON is missing an expected key or has a wrong value kind."""


class JudgeError(IABenchError):
    """Judge output unusable after the single repair re-prompt."""


class StageError(IABenchError):
    """A pipeline stage failed for one unit of work (e.g. one question type)."""


class PipelineError(IABenchError):
    """A stage hard-failure that halted the run; names the failing stage."""

    def __init__(self, stage_name: str, message: str) -> None:
        super().__init__(f"stage '{stage_name}' failed: {message}")
        self.stage_name = stage_name


class MetricError(IABenchError):
    """A metric could not be computed for one pair."""


class ComparisonError(UsageError):
    """Two reports cannot be compared (mismatched metric sets)."""
