"""Domain records shared by every stage, with strict JSON round-trip codecs.

Serialization is canonical: ``to_dict`` emits fields in declaration order and
omits optional fields that are ``None``, so re-encoding a decoded record
reproduces the original line byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from iabench.errors import RecordError

TOPIC_STATUSES = ("candidate", "retained", "rejected")
ITEM_STATUSES = ("active", "discarded")
DVE_STATUSES = ("kept", "dropped")
ORIGINS = ("generated", "improved", "difficulty_enhanced")

EMBEDDING_NORM_TOLERANCE = 1e-6
OVERALL_TOLERANCE = 1e-9


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise RecordError(message)


def _get(data: dict[str, Any], key: str, kind: type, where: str) -> Any:
    _expect(key in data, f"{where}: missing field '{key}'")
    value = data[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is bool:
        ok = isinstance(value, bool)
    else:
        ok = isinstance(value, kind) and not isinstance(value, bool)
    _expect(ok, f"{where}: field '{key}' must be {kind.__name__}")
    return value


@dataclass
class Criterion:
    """One judging rubric: the parameter names rendered into the judge prompt
    plus the rubric sentence itself."""

    parameters: list[str]
    criterion_text: str

    def __post_init__(self) -> None:
        _expect(bool(self.parameters), "Criterion: parameters must be non-empty")
        _expect(all(isinstance(p, str) and p for p in self.parameters),
                "Criterion: parameters must be non-empty strings")
        _expect(bool(self.criterion_text), "Criterion: criterion_text must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {"parameters": list(self.parameters), "criterion_text": self.criterion_text}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Criterion":
        params = _get(data, "parameters", list, "Criterion")
        text = _get(data, "criterion_text", str, "Criterion")
        return cls(parameters=list(params), criterion_text=text)


@dataclass
class JudgeVerdict:
    """A single criterion verdict from the judge model."""

    score: int
    reason: str
    criterion: Criterion
    raw_response: str = ""

    def __post_init__(self) -> None:
        _expect(isinstance(self.score, int) and not isinstance(self.score, bool),
                "JudgeVerdict: score must be an integer")
        _expect(0 <= self.score <= 10, f"JudgeVerdict: score {self.score} outside [0, 10]")
        _expect(bool(self.reason), "JudgeVerdict: reason must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "reason": self.reason,
            "criterion": self.criterion.to_dict(),
            "raw_response": self.raw_response,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "JudgeVerdict":
        return cls(
            score=_get(data, "score", int, "JudgeVerdict"),
            reason=_get(data, "reason", str, "JudgeVerdict"),
            criterion=Criterion.from_dict(_get(data, "criterion", dict, "JudgeVerdict")),
            raw_response=_get(data, "raw_response", str, "JudgeVerdict"),
        )


@dataclass
class GEvalResult:
    """Per-criterion verdicts plus their arithmetic mean for one judged subject."""

    verdicts: list[JudgeVerdict]
    overall: float

    def __post_init__(self) -> None:
        _expect(bool(self.verdicts), "GEvalResult: verdicts must be non-empty")
        mean = sum(v.score for v in self.verdicts) / len(self.verdicts)
        _expect(abs(self.overall - mean) <= OVERALL_TOLERANCE,
                f"GEvalResult: overall {self.overall} is not the mean {mean}")

    @classmethod
    def from_verdicts(cls, verdicts: list[JudgeVerdict]) -> "GEvalResult":
        return cls(verdicts=verdicts, overall=sum(v.score for v in verdicts) / len(verdicts))

    def score_for(self, parameter: str) -> int | None:
        for verdict in self.verdicts:
            if parameter in verdict.criterion.parameters:
                return verdict.score
        return None

    def to_dict(self) -> dict[str, Any]:
        return {"verdicts": [v.to_dict() for v in self.verdicts], "overall": self.overall}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GEvalResult":
        verdicts = [JudgeVerdict.from_dict(v) for v in _get(data, "verdicts", list, "GEvalResult")]
        return cls(verdicts=verdicts, overall=_get(data, "overall", float, "GEvalResult"))


@dataclass
class QuestionType:
    """A short human-authored description of a domain of interest."""

    id: str
    text: str

    def __post_init__(self) -> None:
        _expect(bool(self.id), "QuestionType: id must be non-empty")
        _expect(bool(self.text), "QuestionType: text must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "text": self.text}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "QuestionType":
        return cls(id=_get(data, "id", str, "QuestionType"),
                   text=_get(data, "text", str, "QuestionType"))


@dataclass
class Topic:
    """A candidate noun phrase tied to one question type.

    Topics have no separate id field; the topic text itself (unique per
    question type after case-insensitive dedup) is the identifier referenced
    by ``Instruction.topic_ids``.
    """

    text: str
    question_type_id: str
    scores: GEvalResult | None = None
    status: str = "candidate"
    reason: str | None = None

    def __post_init__(self) -> None:
        _expect(bool(self.text), "Topic: text must be non-empty")
        _expect(self.status in TOPIC_STATUSES, f"Topic: unknown status '{self.status}'")
        if self.status == "rejected":
            _expect(bool(self.reason), "Topic: rejected topics must carry a reason")
        if self.status == "retained":
            _expect(len(self.text.split()) <= 3,
                    f"Topic: retained topic '{self.text}' exceeds three words")

    @property
    def word_count(self) -> int:
        return len(self.text.split())

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"text": self.text, "question_type_id": self.question_type_id}
        if self.scores is not None:
            data["scores"] = self.scores.to_dict()
        data["status"] = self.status
        if self.reason is not None:
            data["reason"] = self.reason
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Topic":
        return cls(
            text=_get(data, "text", str, "Topic"),
            question_type_id=_get(data, "question_type_id", str, "Topic"),
            scores=GEvalResult.from_dict(data["scores"]) if "scores" in data else None,
            status=_get(data, "status", str, "Topic"),
            reason=data.get("reason"),
        )


def _check_item_status(status: str, discard_reason: str | None, where: str) -> None:
    _expect(status in ITEM_STATUSES, f"{where}: unknown status '{status}'")
    if status == "discarded":
        _expect(bool(discard_reason), f"{where}: discarded items must carry a reason")


@dataclass
class Instruction:
    """A single-sentence instruction with full feedback-loop provenance."""

    id: str
    text: str
    language: str
    question_type_id: str
    topic_ids: list[str]
    origin: str = "generated"
    retry_count: int = 0
    scores: list[GEvalResult] = field(default_factory=list)
    status: str = "active"
    discard_reason: str | None = None

    def __post_init__(self) -> None:
        _expect(bool(self.id), "Instruction: id must be non-empty")
        _expect(self.origin in ORIGINS, f"Instruction: unknown origin '{self.origin}'")
        _expect(self.retry_count >= 0, "Instruction: retry_count must be >= 0")
        _check_item_status(self.status, self.discard_reason, "Instruction")

    @property
    def last_scores(self) -> GEvalResult | None:
        return self.scores[-1] if self.scores else None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "language": self.language,
            "question_type_id": self.question_type_id,
            "topic_ids": list(self.topic_ids),
            "origin": self.origin,
            "retry_count": self.retry_count,
            "scores": [s.to_dict() for s in self.scores],
            "status": self.status,
        }
        if self.discard_reason is not None:
            data["discard_reason"] = self.discard_reason
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Instruction":
        return cls(
            id=_get(data, "id", str, "Instruction"),
            text=_get(data, "text", str, "Instruction"),
            language=_get(data, "language", str, "Instruction"),
            question_type_id=_get(data, "question_type_id", str, "Instruction"),
            topic_ids=list(_get(data, "topic_ids", list, "Instruction")),
            origin=_get(data, "origin", str, "Instruction"),
            retry_count=_get(data, "retry_count", int, "Instruction"),
            scores=[GEvalResult.from_dict(s) for s in _get(data, "scores", list, "Instruction")],
            status=_get(data, "status", str, "Instruction"),
            discard_reason=data.get("discard_reason"),
        )


@dataclass
class Answer:
    """A golden answer for one instruction, with its own feedback history."""

    id: str
    instruction_id: str
    text: str
    language: str
    retry_count: int = 0
    scores: list[GEvalResult] = field(default_factory=list)
    status: str = "active"
    discard_reason: str | None = None

    def __post_init__(self) -> None:
        _expect(bool(self.id), "Answer: id must be non-empty")
        _expect(self.retry_count >= 0, "Answer: retry_count must be >= 0")
        _check_item_status(self.status, self.discard_reason, "Answer")

    @property
    def last_scores(self) -> GEvalResult | None:
        return self.scores[-1] if self.scores else None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "id": self.id,
            "instruction_id": self.instruction_id,
            "text": self.text,
            "language": self.language,
            "retry_count": self.retry_count,
            "scores": [s.to_dict() for s in self.scores],
            "status": self.status,
        }
        if self.discard_reason is not None:
            data["discard_reason"] = self.discard_reason
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Answer":
        return cls(
            id=_get(data, "id", str, "Answer"),
            instruction_id=_get(data, "instruction_id", str, "Answer"),
            text=_get(data, "text", str, "Answer"),
            language=_get(data, "language", str, "Answer"),
            retry_count=_get(data, "retry_count", int, "Answer"),
            scores=[GEvalResult.from_dict(s) for s in _get(data, "scores", list, "Answer")],
            status=_get(data, "status", str, "Answer"),
            discard_reason=data.get("discard_reason"),
        )


@dataclass
class IAPair:
    """An instruction paired with its golden answer, plus diversity-filter state."""

    instruction: Instruction
    answer: Answer
    embedding: list[float] | None = None
    dve_status: str = "kept"
    dve_min_distance: float | None = None
    dve_conflicting_pair_id: str | None = None
    dve_drop_reason: str | None = None

    def __post_init__(self) -> None:
        _expect(self.dve_status in DVE_STATUSES, f"IAPair: unknown dve_status '{self.dve_status}'")
        if self.embedding is not None:
            norm = math.sqrt(sum(x * x for x in self.embedding))
            _expect(abs(norm - 1.0) <= EMBEDDING_NORM_TOLERANCE,
                    f"IAPair: embedding norm {norm} is not unit within {EMBEDDING_NORM_TOLERANCE}")
        if self.dve_status == "dropped":
            _expect(self.dve_min_distance is not None or self.dve_drop_reason == "embed_error",
                    "IAPair: dropped pairs must record the offending distance")

    @property
    def pair_id(self) -> str:
        return self.instruction.id

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "instruction": self.instruction.to_dict(),
            "answer": self.answer.to_dict(),
        }
        if self.embedding is not None:
            data["embedding"] = list(self.embedding)
        data["dve_status"] = self.dve_status
        if self.dve_min_distance is not None:
            data["dve_min_distance"] = self.dve_min_distance
        if self.dve_conflicting_pair_id is not None:
            data["dve_conflicting_pair_id"] = self.dve_conflicting_pair_id
        if self.dve_drop_reason is not None:
            data["dve_drop_reason"] = self.dve_drop_reason
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IAPair":
        return cls(
            instruction=Instruction.from_dict(_get(data, "instruction", dict, "IAPair")),
            answer=Answer.from_dict(_get(data, "answer", dict, "IAPair")),
            embedding=list(data["embedding"]) if "embedding" in data else None,
            dve_status=_get(data, "dve_status", str, "IAPair"),
            dve_min_distance=data.get("dve_min_distance"),
            dve_conflicting_pair_id=data.get("dve_conflicting_pair_id"),
            dve_drop_reason=data.get("dve_drop_reason"),
        )


@dataclass
class FeedbackRound:
    """Bookkeeping for one judge/improve round of a feedback loop."""

    round_index: int
    items_in: int
    items_passed: int
    items_improved: int
    items_discarded: int

    def __post_init__(self) -> None:
        _expect(self.items_in == self.items_passed + self.items_improved + self.items_discarded,
                "FeedbackRound: items_in must equal passed + improved + discarded")
