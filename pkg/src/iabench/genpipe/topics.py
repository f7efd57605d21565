"""Topic generation and filtering: first pipeline stage pair."""

from __future__ import annotations

import logging

from iabench.core.records import QuestionType, Topic
from iabench.errors import JsonParseError, JsonSchemaError, JudgeError, StageError
from iabench.genpipe.config import PipelineConfig
from iabench.judge import geval, load_criteria, passes
from iabench.prompts import DEFAULT_FORMAT_INSTRUCTIONS, render_template
from iabench.provider.base import ChatRequest, Provider, chat_json
from iabench.provider.jsonx import LIST_OF_STRINGS

logger = logging.getLogger(__name__)

MAX_TOPIC_WORDS = 3


def generate_topics(provider: Provider, config: PipelineConfig, qt: QuestionType,
                    count: int) -> list[Topic]:
    """Produce up to ``count`` candidate topics for one question type.

    Shortfalls and overflows from the generator are accepted as-is (capped at
    ``count``) and logged; there is no re-prompt just to fix the count.
    """
    prompt = render_template("topics_generation", question_type=qt.text,
                             format_instructions=DEFAULT_FORMAT_INSTRUCTIONS)
    request = ChatRequest(model_id=config.generation_model, prompt=prompt,
                          temperature=config.generation_temperature,
                          max_output_tokens=config.max_output_tokens)
    try:
        data = chat_json(provider, request, {"topics": LIST_OF_STRINGS})
    except (JsonParseError, JsonSchemaError) as exc:
        raise StageError(f"topic generation failed for question type '{qt.id}': {exc}") from exc
    texts = data["topics"]
    if len(texts) != count:
        logger.warning("question type '%s': requested %d topics, parsed %d",
                       qt.id, count, len(texts))
    return [Topic(text=text, question_type_id=qt.id) for text in texts[:count]]


def filter_topics(provider: Provider, config: PipelineConfig, topics: list[Topic],
                  qt: QuestionType) -> list[Topic]:
    """Judge candidates against the topic rubric; returns every topic with its
    final status (retained or rejected, with scores and reasons).

    Literal duplicates (case-insensitive) are rejected before judging; topics
    longer than three words are rejected outright, regardless of scores.
    """
    criteria = load_criteria("topic", config.language)
    subject_context = f"The question type is: {qt.text}"
    out: list[Topic] = []
    seen: set[str] = set()
    for topic in topics:
        key = topic.text.strip().lower()
        if key in seen:
            out.append(Topic(text=topic.text, question_type_id=topic.question_type_id,
                             status="rejected", reason="duplicate"))
            continue
        seen.add(key)
        if topic.word_count > MAX_TOPIC_WORDS:
            out.append(Topic(text=topic.text, question_type_id=topic.question_type_id,
                             status="rejected", reason="word_count"))
            continue
        try:
            result = geval(provider, config.filtering_model, subject_context, topic.text,
                           criteria, parallelism=config.parallelism,
                           max_output_tokens=config.max_output_tokens)
        except JudgeError as exc:
            logger.warning("topic '%s' failed judging: %s", topic.text, exc)
            out.append(Topic(text=topic.text, question_type_id=topic.question_type_id,
                             status="rejected", reason="judge_error"))
            continue
        if passes(result, config.tau, mode=config.gate_mode):
            out.append(Topic(text=topic.text, question_type_id=topic.question_type_id,
                             scores=result, status="retained"))
        else:
            out.append(Topic(text=topic.text, question_type_id=topic.question_type_id,
                             scores=result, status="rejected",
                             reason="geval_below_threshold"))
    return out
