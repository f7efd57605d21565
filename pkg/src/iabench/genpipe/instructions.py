"""Instruction batch generation and the judge/improve/re-judge feedback loop."""

from __future__ import annotations

import logging
import random

from iabench.core.records import FeedbackRound, GEvalResult, Instruction, QuestionType, Topic
from iabench.errors import (
    JsonParseError,
    JsonSchemaError,
    JudgeError,
    ProviderError,
    StageError,
)
from iabench.genpipe.config import PipelineConfig
from iabench.judge import geval, load_criteria, passes
from iabench.prompts import (
    DEFAULT_FORMAT_INSTRUCTIONS,
    render_json_list,
    render_template,
)
from iabench.provider.base import ChatRequest, Provider, chat_json
from iabench.provider.jsonx import LIST_OF_STRINGS

logger = logging.getLogger(__name__)


def sample_topics(filtered_topics: list[Topic], count: int, round_seed: int) -> list[Topic]:
    """Seeded uniform subset of the retained topics, original order preserved."""
    if len(filtered_topics) < count:
        raise StageError(
            f"need {count} filtered topics to sample, have {len(filtered_topics)}")
    rng = random.Random(round_seed)
    picks = sorted(rng.sample(range(len(filtered_topics)), count))
    return [filtered_topics[i] for i in picks]


def generate_instruction_batch(provider: Provider, config: PipelineConfig,
                               filtered_topics: list[Topic], qt: QuestionType,
                               iteration: int, round_seed: int) -> list[Instruction]:
    """Generate one iteration's instruction batch from a sampled topic subset."""
    sampled = sample_topics(filtered_topics, config.topics_sampled, round_seed)
    topic_texts = [t.text for t in sampled]
    prompt = render_template(
        "instructions_generation",
        number_of_instructions=str(config.instructions_per_iteration),
        instruction_types="\n    ".join(config.instruction_types),
        instruction_language=config.language,
        topics=render_json_list(topic_texts),
        instruction_domain=qt.text,
        format_instructions=DEFAULT_FORMAT_INSTRUCTIONS,
    )
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    try:
        data = chat_json(provider, request, {"instructions": LIST_OF_STRINGS})
    except (JsonParseError, JsonSchemaError) as exc:
        raise StageError(
            f"instruction generation failed for '{qt.id}' iteration {iteration}: {exc}"
        ) from exc
    texts = data["instructions"]
    if len(texts) != config.instructions_per_iteration:
        logger.warning("'%s' iteration %d: requested %d instructions, parsed %d",
                       qt.id, iteration, config.instructions_per_iteration, len(texts))
    return [
        Instruction(
            id=f"{qt.id}-i{iteration:03d}-{k:03d}",
            text=text,
            language=config.language,
            question_type_id=qt.id,
            topic_ids=topic_texts,
        )
        for k, text in enumerate(texts[:config.instructions_per_iteration])
    ]


def _failing_feedback(result: GEvalResult, tau: float) -> list[str]:
    return [f"{'/'.join(v.criterion.parameters)}: {v.reason}"
            for v in result.verdicts if v.score < tau]


def _improve_batch(provider: Provider, config: PipelineConfig,
                   items: list[Instruction], qt: QuestionType,
                   topic_texts: list[str], tau: float) -> list[str]:
    """One improvement call for the pooled failures; latest verdict reasons ride
    along with each instruction so the generator knows what to fix."""
    payload = [
        {"instruction": item.text,
         "feedback": _failing_feedback(item.scores[-1], tau) if item.scores else []}
        for item in items
    ]
    prompt = render_template(
        "instructions_improvement",
        instruction_types="\n    ".join(config.instruction_types),
        instruction_language=config.language,
        topics=render_json_list(topic_texts),
        instruction_domain=qt.text,
        instructions=render_json_list(payload),
    )
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    data = chat_json(provider, request, {"instructions": LIST_OF_STRINGS})
    return data["instructions"]


def instruction_feedback_loop(provider: Provider, config: PipelineConfig,
                              batch: list[Instruction], qt: QuestionType,
                              topic_texts: list[str], *,
                              rounds: list[FeedbackRound] | None = None,
                              ) -> tuple[list[Instruction], list[Instruction]]:
    """Judge the batch, improve failures, re-judge; discard after n_max failures.

    Retained items have every instruction-rubric score >= tau. ``retry_count``
    counts failed judge rounds; an item failing its n_max-th round is
    discarded with reason "exhausted" and its full verdict history kept.
    """
    criteria = load_criteria("instruction", config.language)
    retained: list[Instruction] = []
    discarded: list[Instruction] = []
    active = list(batch)
    round_index = 0
    while active:
        batch_context = (
            f"The instruction domain is: {qt.text}\n"
            f"The topics are: {render_json_list(topic_texts)}\n"
            f"The instruction batch is: {render_json_list([i.text for i in active])}"
        )
        items_in = len(active)
        passed_count = 0
        discarded_count = 0
        failures: list[Instruction] = []
        for item in active:
            try:
                result = geval(provider, config.filtering_model, batch_context, item.text,
                               criteria, parallelism=config.parallelism,
                               max_output_tokens=config.max_output_tokens)
            except JudgeError as exc:
                logger.warning("instruction %s failed judging: %s", item.id, exc)
                item.status = "discarded"
                item.discard_reason = "judge_error"
                discarded.append(item)
                discarded_count += 1
                continue
            item.scores.append(result)
            if passes(result, config.tau, mode=config.gate_mode):
                retained.append(item)
                passed_count += 1
            else:
                item.retry_count += 1
                failures.append(item)

        to_improve = [i for i in failures if i.retry_count < config.n_max]
        for item in failures:
            if item.retry_count >= config.n_max:
                item.status = "discarded"
                item.discard_reason = "exhausted"
                discarded.append(item)
                discarded_count += 1

        if to_improve:
            try:
                improved = _improve_batch(provider, config, to_improve, qt,
                                          topic_texts, config.tau)
            except (ProviderError, JsonParseError, JsonSchemaError) as exc:
                logger.warning("improvement call failed for %d instructions: %s",
                               len(to_improve), exc)
                for item in to_improve:
                    item.status = "discarded"
                    item.discard_reason = "improvement_error"
                    discarded.append(item)
                discarded_count += len(to_improve)
                to_improve = []
            else:
                if len(improved) < len(to_improve):
                    logger.warning("improvement returned %d texts for %d instructions",
                                   len(improved), len(to_improve))
                matched = to_improve[:len(improved)]
                for item in to_improve[len(improved):]:
                    item.status = "discarded"
                    item.discard_reason = "improvement_error"
                    discarded.append(item)
                    discarded_count += 1
                for item, new_text in zip(matched, improved):
                    item.text = new_text
                    item.origin = "improved"
                to_improve = matched

        if rounds is not None:
            rounds.append(FeedbackRound(round_index=round_index, items_in=items_in,
                                        items_passed=passed_count,
                                        items_improved=len(to_improve),
                                        items_discarded=discarded_count))
        active = to_improve
        round_index += 1
    return retained, discarded
