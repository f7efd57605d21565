"""Difficulty enhancement: adversarial paraphrasing with threshold gating.

Enhanced texts that clear the difficulty rubric replace their originals
(origin becomes "difficulty_enhanced"); failing enhancements are recorded as
discarded audit records and the original instruction survives unchanged, so
the stage never shrinks the active set.
"""

from __future__ import annotations

import logging

from iabench.core.records import Instruction, QuestionType
from iabench.errors import JsonParseError, JsonSchemaError, JudgeError, ProviderError
from iabench.genpipe.config import PipelineConfig
from iabench.judge import geval, load_criteria, passes
from iabench.prompts import render_json_list, render_template
from iabench.provider.base import ChatRequest, Provider, chat_json
from iabench.provider.jsonx import LIST_OF_STRINGS

logger = logging.getLogger(__name__)


def _enhance_chunk(provider: Provider, config: PipelineConfig,
                   chunk: list[Instruction]) -> list[str]:
    prompt = render_template(
        "instructions_difficulty",
        instruction_language=config.language,
        instructions=render_json_list([item.text for item in chunk]),
    )
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    data = chat_json(provider, request, {"instructions": LIST_OF_STRINGS})
    return data["instructions"]


def dfe(provider: Provider, config: PipelineConfig, instructions: list[Instruction],
        question_types: list[QuestionType]) -> list[Instruction]:
    """Run difficulty enhancement over active instructions.

    With ``dfe_enabled`` false this is the identity on the input list.
    A failed enhancement call leaves the affected originals untouched.
    """
    if not config.dfe_enabled:
        return instructions
    criteria = load_criteria("difficulty", config.language)
    qt_by_id = {qt.id: qt for qt in question_types}
    out: list[Instruction] = []
    index = 0
    while index < len(instructions):
        # Keep enhancement batches at the generation batch size, same QT only.
        chunk = [instructions[index]]
        index += 1
        while (index < len(instructions)
               and len(chunk) < config.instructions_per_iteration
               and instructions[index].question_type_id == chunk[0].question_type_id):
            chunk.append(instructions[index])
            index += 1
        qt = qt_by_id[chunk[0].question_type_id]
        try:
            enhanced_texts = _enhance_chunk(provider, config, chunk)
        except (ProviderError, JsonParseError, JsonSchemaError) as exc:
            logger.warning("difficulty enhancement failed for a %d-instruction batch, "
                           "keeping originals: %s", len(chunk), exc)
            out.extend(chunk)
            continue
        if len(enhanced_texts) < len(chunk):
            logger.warning("difficulty enhancement returned %d texts for %d instructions",
                           len(enhanced_texts), len(chunk))
        for position, original in enumerate(chunk):
            if position >= len(enhanced_texts):
                out.append(original)
                continue
            enhanced_text = enhanced_texts[position]
            subject_context = (f"The instruction domain is: {qt.text}\n"
                               f"The original instruction is: {original.text}")
            try:
                result = geval(provider, config.filtering_model, subject_context,
                               enhanced_text, criteria, parallelism=config.parallelism,
                               max_output_tokens=config.max_output_tokens)
            except JudgeError as exc:
                logger.warning("judging enhanced form of %s failed: %s", original.id, exc)
                out.append(original)
                out.append(_audit_record(original, enhanced_text, None, "judge_error"))
                continue
            if passes(result, config.tau, mode=config.gate_mode):
                original.text = enhanced_text
                original.origin = "difficulty_enhanced"
                original.scores.append(result)
                out.append(original)
            else:
                out.append(original)
                out.append(_audit_record(original, enhanced_text, result,
                                         "dfe_below_threshold"))
    return out


def _audit_record(original: Instruction, enhanced_text: str, result, reason: str) -> Instruction:
    return Instruction(
        id=f"{original.id}-dfe",
        text=enhanced_text,
        language=original.language,
        question_type_id=original.question_type_id,
        topic_ids=list(original.topic_ids),
        origin="difficulty_enhanced",
        scores=[result] if result is not None else [],
        status="discarded",
        discard_reason=reason,
    )
