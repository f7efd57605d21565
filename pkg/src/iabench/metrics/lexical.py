"""Lexical answer metrics: tokenization and ROUGE-L (LCS-based F1)."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass


@dataclass
class MetricScore:
    name: str
    value: float
    components: tuple[float, float] | None = None  # (precision, recall)
    range_max: float = 1.0


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on Unicode whitespace, strip edge punctuation per token."""
    tokens = []
    for raw in text.lower().split():
        start = 0
        end = len(raw)
        while start < end and _is_punctuation(raw[start]):
            start += 1
        while end > start and _is_punctuation(raw[end - 1]):
            end -= 1
        if end > start:
            tokens.append(raw[start:end])
    return tokens


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length by dynamic programming."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for item_a in a:
        current = [0]
        for j, item_b in enumerate(b, start=1):
            if item_a == item_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(candidate: str, reference: str) -> MetricScore:
    """ROUGE-L F1 (beta=1): precision = LCS/|candidate|, recall = LCS/|reference|.

    No stemming, no stopword removal; zero when either side is empty.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return MetricScore(name="rouge_l", value=0.0, components=(0.0, 0.0))
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    if precision + recall == 0.0:
        return MetricScore(name="rouge_l", value=0.0, components=(0.0, 0.0))
    f1 = 2.0 * precision * recall / (precision + recall)
    return MetricScore(name="rouge_l", value=f1, components=(precision, recall))
