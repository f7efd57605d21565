"""Embedding-based answer metrics: semantic token-match F1 and answer relevance.

``semantic_f1`` mirrors the precision/recall/F1 structure of greedy
token-matching semantic scores, but runs on provider token embeddings instead
of a pretrained contextual transformer, keeping the engine inference-free.
Reports label it ``semantic_f1`` throughout.
"""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from iabench.errors import JsonParseError, JsonSchemaError, MetricError, ProviderError
from iabench.metrics.lexical import MetricScore, tokenize
from iabench.provider.jsonx import LIST_OF_STRINGS, extract_json

logger = logging.getLogger(__name__)

ChatFn = Callable[[str], str]
EmbedFn = Callable[[Sequence[str]], list]

DEFAULT_QUESTION_COUNT = 3

QUESTION_GENERATION_PROMPT = """You are asked to write {k} plausible questions that the given answer would directly and completely answer.

Here are the requirements:
1. Each question must be answerable using only the given answer.
2. Each question should be a single sentence.
3. Output your answer in JSON format like this:
    {{
    "questions": A JSON list of {k} questions, following the requirements
}}
The answer is: {answer}
Json Output:"""


def _vector(values) -> np.ndarray:
    array = np.asarray(getattr(values, "values", values), dtype=np.float64)
    norm = np.linalg.norm(array)
    return array / norm if norm > 0 else array


def semantic_f1(candidate: str, reference: str, embed: EmbedFn) -> MetricScore:
    """Greedy token-embedding match F1 between candidate and reference.

    Precision is the mean over candidate tokens of the best cosine similarity
    to any reference token (clamped to [0, 1]); recall is symmetric.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return MetricScore(name="semantic_f1", value=0.0, components=(0.0, 0.0))
    vocabulary = sorted(set(cand) | set(ref))
    try:
        vectors = embed(vocabulary)
    except ProviderError as exc:
        raise MetricError(f"embedding failed for semantic_f1: {exc}") from exc
    unit = {token: _vector(v) for token, v in zip(vocabulary, vectors)}
    sims = np.clip(np.stack([unit[t] for t in cand]) @ np.stack([unit[t] for t in ref]).T,
                   0.0, 1.0)
    # identical tokens share one embedding; their cosine is exactly 1
    for i, cand_token in enumerate(cand):
        for j, ref_token in enumerate(ref):
            if cand_token == ref_token:
                sims[i, j] = 1.0
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    if precision + recall == 0.0:
        return MetricScore(name="semantic_f1", value=0.0, components=(0.0, 0.0))
    f1 = 2.0 * precision * recall / (precision + recall)
    return MetricScore(name="semantic_f1", value=f1, components=(precision, recall))


def answer_relevance(instruction: str, answer: str, chat: ChatFn, embed: EmbedFn,
                     k: int = DEFAULT_QUESTION_COUNT) -> MetricScore:
    """Mean clamped cosine similarity between the original instruction and k
    questions regenerated from the answer alone."""
    if k < 1:
        raise MetricError("answer_relevance requires k >= 1")
    prompt = QUESTION_GENERATION_PROMPT.format(k=k, answer=answer)
    try:
        raw = chat(prompt)
        questions = extract_json(raw, {"questions": LIST_OF_STRINGS})["questions"]
    except (ProviderError, JsonParseError, JsonSchemaError) as exc:
        raise MetricError(f"question generation failed for answer_relevance: {exc}") from exc
    if not questions:
        raise MetricError("question generation returned no questions")
    if len(questions) != k:
        logger.debug("answer_relevance: requested %d questions, got %d", k, len(questions))
    try:
        vectors = embed([instruction] + questions)
    except ProviderError as exc:
        raise MetricError(f"embedding failed for answer_relevance: {exc}") from exc
    matrix = np.stack([_vector(v) for v in vectors])
    sims = np.clip(matrix[1:] @ matrix[0], 0.0, 1.0)
    return MetricScore(name="answer_relevance", value=float(sims.mean()))
