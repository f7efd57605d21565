"""Pipeline configuration: validation, canonical serialization, hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from iabench.core.records import QuestionType
from iabench.errors import ConfigValidationError

DEFAULT_INSTRUCTION_TYPES = [
    "open-ended questions",
    "yes/no questions",
    "multiple-choice questions",
    "imperative single-step tasks",
    "comparison questions",
]

_COUNT_FIELDS = ("topics_per_qt", "topics_sampled", "iterations",
                 "instructions_per_iteration", "n_max", "parallelism")


@dataclass
class PipelineConfig:
    question_types: list[QuestionType]
    language: str = "English"
    tau: float = 8.0
    topics_per_qt: int = 20
    topics_sampled: int = 5
    iterations: int = 50
    instructions_per_iteration: int = 50
    n_max: int = 3
    dve_threshold: float = 0.3
    dfe_enabled: bool = True
    dve_enabled: bool = True
    instruction_types: list[str] = field(
        default_factory=lambda: list(DEFAULT_INSTRUCTION_TYPES))
    generation_model: str = "gemini-1.5-pro-002"
    filtering_model: str = "gemini-2.0-flash-001"
    embedding_model: str = "bge-m3"
    gate_mode: str = "per_criterion"
    generation_temperature: float = 0.7
    max_output_tokens: int = 1024
    parallelism: int = 1

    def validate(self) -> None:
        """Raise ``ConfigValidationError`` naming the first offending field."""
        if not self.question_types:
            raise ConfigValidationError("question_types", "must be non-empty")
        seen_ids = set()
        for qt in self.question_types:
            if qt.id in seen_ids:
                raise ConfigValidationError("question_types", f"duplicate id '{qt.id}'")
            seen_ids.add(qt.id)
        for name in _COUNT_FIELDS:
            if getattr(self, name) < 1:
                raise ConfigValidationError(name, "must be >= 1")
        if not 0.0 <= self.tau <= 10.0:
            raise ConfigValidationError("tau", f"{self.tau} outside [0, 10]")
        if not 0.0 <= self.dve_threshold <= 2.0:
            raise ConfigValidationError("dve_threshold",
                                        f"{self.dve_threshold} outside [0, 2]")
        if self.gate_mode not in ("per_criterion", "mean"):
            raise ConfigValidationError("gate_mode", f"unknown mode '{self.gate_mode}'")
        if not self.language:
            raise ConfigValidationError("language", "must be non-empty")
        if not self.instruction_types:
            raise ConfigValidationError("instruction_types", "must be non-empty")
        if not 0.0 <= self.generation_temperature <= 2.0:
            raise ConfigValidationError("generation_temperature",
                                        f"{self.generation_temperature} outside [0, 2]")
        if self.max_output_tokens < 1:
            raise ConfigValidationError("max_output_tokens", "must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "question_types": [qt.to_dict() for qt in self.question_types],
            "language": self.language,
            "tau": self.tau,
            "topics_per_qt": self.topics_per_qt,
            "topics_sampled": self.topics_sampled,
            "iterations": self.iterations,
            "instructions_per_iteration": self.instructions_per_iteration,
            "n_max": self.n_max,
            "dve_threshold": self.dve_threshold,
            "dfe_enabled": self.dfe_enabled,
            "dve_enabled": self.dve_enabled,
            "instruction_types": list(self.instruction_types),
            "generation_model": self.generation_model,
            "filtering_model": self.filtering_model,
            "embedding_model": self.embedding_model,
            "gate_mode": self.gate_mode,
            "generation_temperature": self.generation_temperature,
            "max_output_tokens": self.max_output_tokens,
            "parallelism": self.parallelism,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigValidationError(sorted(unknown)[0], "unknown config field")
        kwargs = dict(data)
        if "question_types" in kwargs:
            kwargs["question_types"] = [QuestionType.from_dict(qt)
                                        for qt in kwargs["question_types"]]
        try:
            config = cls(**kwargs)
        except TypeError as exc:
            raise ConfigValidationError("question_types", str(exc)) from exc
        config.validate()
        return config

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def derive_seed(seed: int, *parts: str) -> int:
    """Stable 64-bit sub-seed for one stage/unit, isolated from the others."""
    payload = "/".join((str(seed),) + parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")
