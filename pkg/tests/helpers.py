"""Shared builders for the test suite."""

from __future__ import annotations

import json
import re

from iabench.core.records import Criterion, GEvalResult, JudgeVerdict, QuestionType
from iabench.genpipe.config import PipelineConfig

QT1 = QuestionType(id="qt1", text="adversarial history questions")
QT2 = QuestionType(id="qt2", text="misleading science questions")


def make_config(**overrides) -> PipelineConfig:
    defaults = dict(
        question_types=[QT1, QT2],
        topics_per_qt=5,
        topics_sampled=2,
        iterations=3,
        instructions_per_iteration=5,
        n_max=2,
    )
    defaults.update(overrides)
    return PipelineConfig(**defaults)


def verdict_json(score: int, reason: str = "scripted verdict") -> str:
    return json.dumps({"score": score, "reason": reason})


def judge_pattern(parameter: str | None = None, subject: str | None = None) -> str:
    """Regex matching a rendered judge prompt for one criterion and/or one
    judged subject (the text right after the assistant header)."""
    subject_part = r"assistant<\|end_header_id\|>\n    "
    if subject is not None:
        subject_part += re.escape(subject)
    if parameter is None:
        return subject_part
    parameter_part = rf"using the {re.escape(parameter)} fields"
    return f"{parameter_part}.*{subject_part}"


def make_result(scores: list[int], parameters: list[str] | None = None) -> GEvalResult:
    parameters = parameters or [f"Param{i}" for i in range(len(scores))]
    verdicts = [
        JudgeVerdict(score=score, reason="fixture",
                     criterion=Criterion(parameters=[param], criterion_text=f"{param} rubric"))
        for score, param in zip(scores, parameters)
    ]
    return GEvalResult.from_verdicts(verdicts)
