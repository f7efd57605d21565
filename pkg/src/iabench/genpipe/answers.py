"""Golden-answer generation and its quality feedback loop."""

from __future__ import annotations

import logging

from iabench.core.records import Answer, FeedbackRound, Instruction
from iabench.errors import JsonParseError, JsonSchemaError, JudgeError, ProviderError
from iabench.genpipe.config import PipelineConfig
from iabench.judge import geval, load_criteria, passes
from iabench.prompts import render_template
from iabench.provider.base import ChatRequest, Provider, chat_json
from iabench.provider.jsonx import STRING

logger = logging.getLogger(__name__)


def generate_answer(provider: Provider, config: PipelineConfig,
                    instruction: Instruction) -> Answer:
    """One answer per instruction, in the instruction's language.

    Parse failures (after the repair re-prompt) yield a discarded answer
    record so the pair is excluded downstream with a reason.
    """
    prompt = render_template("answer_generation", instruction=instruction.text,
                             instruction_language=instruction.language)
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    answer_id = f"{instruction.id}-ans"
    try:
        data = chat_json(provider, request, {"answer": STRING})
    except (ProviderError, JsonParseError, JsonSchemaError) as exc:
        logger.warning("answer generation failed for %s: %s", instruction.id, exc)
        return Answer(id=answer_id, instruction_id=instruction.id, text="",
                      language=instruction.language, status="discarded",
                      discard_reason="generation_error")
    return Answer(id=answer_id, instruction_id=instruction.id, text=data["answer"],
                  language=instruction.language)


def _improve_answer(provider: Provider, config: PipelineConfig,
                    instruction: Instruction, answer: Answer) -> str:
    prompt = render_template("answer_improvement", instruction=instruction.text,
                             answer=answer.text, instruction_language=answer.language)
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    return chat_json(provider, request, {"answer": STRING})["answer"]


def answer_feedback_loop(provider: Provider, config: PipelineConfig,
                         pairs: list[tuple[Instruction, Answer]], *,
                         rounds: list[FeedbackRound] | None = None,
                         ) -> tuple[list[Answer], list[Answer]]:
    """Same loop contract as the instruction loop, judged on (instruction,
    answer) with the five answer criteria; improvement is one answer at a time."""
    criteria = load_criteria("answer", config.language)
    retained: list[Answer] = []
    discarded: list[Answer] = []
    active = list(pairs)
    round_index = 0
    while active:
        items_in = len(active)
        passed_count = 0
        discarded_count = 0
        failures: list[tuple[Instruction, Answer]] = []
        for instruction, answer in active:
            try:
                result = geval(provider, config.filtering_model, instruction.text,
                               answer.text, criteria, parallelism=config.parallelism,
                               max_output_tokens=config.max_output_tokens)
            except JudgeError as exc:
                logger.warning("answer %s failed judging: %s", answer.id, exc)
                answer.status = "discarded"
                answer.discard_reason = "judge_error"
                discarded.append(answer)
                discarded_count += 1
                continue
            answer.scores.append(result)
            if passes(result, config.tau, mode=config.gate_mode):
                retained.append(answer)
                passed_count += 1
            else:
                answer.retry_count += 1
                failures.append((instruction, answer))

        to_improve = [(i, a) for i, a in failures if a.retry_count < config.n_max]
        for _, answer in failures:
            if answer.retry_count >= config.n_max:
                answer.status = "discarded"
                answer.discard_reason = "exhausted"
                discarded.append(answer)
                discarded_count += 1

        improved: list[tuple[Instruction, Answer]] = []
        for instruction, answer in to_improve:
            try:
                answer.text = _improve_answer(provider, config, instruction, answer)
            except (ProviderError, JsonParseError, JsonSchemaError) as exc:
                logger.warning("answer improvement failed for %s: %s", answer.id, exc)
                answer.status = "discarded"
                answer.discard_reason = "improvement_error"
                discarded.append(answer)
                discarded_count += 1
                continue
            improved.append((instruction, answer))

        if rounds is not None:
            rounds.append(FeedbackRound(round_index=round_index, items_in=items_in,
                                        items_passed=passed_count,
                                        items_improved=len(improved),
                                        items_discarded=discarded_count))
        active = improved
        round_index += 1
    return retained, discarded
