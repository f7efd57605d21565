"""Statistical answer-quality metrics."""

from iabench.metrics.lexical import MetricScore, lcs_length, rouge_l, tokenize
from iabench.metrics.semantic import (
    DEFAULT_QUESTION_COUNT,
    answer_relevance,
    semantic_f1,
)

__all__ = [
    "DEFAULT_QUESTION_COUNT",
    "MetricScore",
    "answer_relevance",
    "lcs_length",
    "rouge_l",
    "semantic_f1",
    "tokenize",
]
