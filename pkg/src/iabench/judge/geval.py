"""Per-criterion LLM-as-a-judge scoring with threshold gating.

Each criterion is judged in its own chat call at temperature 0; never in one
combined call. The overall score is the arithmetic mean of the per-criterion
integer scores. Gating defaults to the strict per-criterion minimum; the
mean-based alternative is available via ``mode="mean"``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from iabench.core.records import Criterion, GEvalResult, JudgeVerdict
from iabench.errors import JsonParseError, JsonSchemaError, JudgeError, ProviderError
from iabench.prompts import render_template
from iabench.provider.base import ChatRequest, Provider
from iabench.provider.jsonx import INTEGER, STRING, extract_json

logger = logging.getLogger(__name__)

JUDGE_TEMPERATURE = 0.0
VERDICT_SCHEMA = {"score": INTEGER, "reason": STRING}

GATE_MODES = ("per_criterion", "mean")

_REPAIR_NOTE = (
    "\n\nThe previous reply was not a valid verdict. Return only a JSON object "
    'with keys "score" (an integer from 0 to 10) and "reason".'
)


def render_judge_prompt(criterion: Criterion, subject_user_prompt: str,
                        subject_response: str) -> str:
    return render_template(
        "evaluation",
        parameters=", ".join(criterion.parameters),
        criteria=criterion.criterion_text,
        user_prompt=subject_user_prompt,
        assistant_response=subject_response,
    )


def _validated_verdict(raw: str, criterion: Criterion) -> JudgeVerdict:
    data = extract_json(raw, VERDICT_SCHEMA)
    score = data["score"]
    if not 0 <= score <= 10:
        raise JsonSchemaError(f"score {score} outside the declared 0-10 range")
    reason = data["reason"].strip()
    if not reason:
        raise JsonSchemaError("reason must be non-empty")
    return JudgeVerdict(score=score, reason=reason, criterion=criterion, raw_response=raw)


def judge_criterion(provider: Provider, judge_model_id: str, subject_user_prompt: str,
                    subject_response: str, criterion: Criterion, *,
                    max_output_tokens: int = 1024) -> JudgeVerdict:
    """Score one subject against one criterion; re-prompts once on bad output."""
    prompt = render_judge_prompt(criterion, subject_user_prompt, subject_response)
    request = ChatRequest(model_id=judge_model_id, prompt=prompt,
                          temperature=JUDGE_TEMPERATURE, max_output_tokens=max_output_tokens)
    raw = provider.chat(request)
    try:
        return _validated_verdict(raw, criterion)
    except (JsonParseError, JsonSchemaError) as first_error:
        logger.debug("judge output rejected (%s); re-prompting once", first_error)
    repair = ChatRequest(model_id=judge_model_id,
                         prompt=f"{prompt}\n\nYour reply was:\n{raw}{_REPAIR_NOTE}",
                         temperature=JUDGE_TEMPERATURE, max_output_tokens=max_output_tokens)
    try:
        return _validated_verdict(provider.chat(repair), criterion)
    except (JsonParseError, JsonSchemaError, ProviderError) as exc:
        raise JudgeError(f"unusable judge output for criterion "
                         f"{criterion.parameters}: {exc}") from exc


def geval(provider: Provider, judge_model_id: str, subject_user_prompt: str,
          subject_response: str, criteria: Sequence[Criterion], *,
          parallelism: int = 1, max_output_tokens: int = 1024) -> GEvalResult:
    """One judge call per criterion; overall is the mean of the scores."""
    if not criteria:
        raise JudgeError("geval requires a non-empty criteria list")

    def one(criterion: Criterion) -> JudgeVerdict:
        return judge_criterion(provider, judge_model_id, subject_user_prompt,
                               subject_response, criterion,
                               max_output_tokens=max_output_tokens)

    if parallelism > 1 and len(criteria) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as executor:
            verdicts = list(executor.map(one, criteria))
    else:
        verdicts = [one(c) for c in criteria]
    return GEvalResult.from_verdicts(verdicts)


def passes(result: GEvalResult, tau: float, *, mode: str = "per_criterion") -> bool:
    """True when the result clears the threshold under the configured gate."""
    if mode not in GATE_MODES:
        raise JudgeError(f"unknown gate mode '{mode}'")
    if mode == "mean":
        return result.overall >= tau
    return all(verdict.score >= tau for verdict in result.verdicts)
