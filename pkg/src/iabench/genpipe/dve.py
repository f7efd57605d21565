"""Diversity enhancement: embedding-distance near-duplicate removal.

Each pair is embedded on "instruction\\nanswer" text, unit-normalized, and
swept greedily in generation order within its group (one group per question
type): a pair is kept iff its cosine distance (1 - dot) to every previously
kept pair in the group is at least the threshold. Dropped pairs record the
minimum distance and the kept pair that caused the drop. Threshold 0 keeps
everything; threshold 2 keeps one pair per group (barring antipodal vectors).
"""

from __future__ import annotations

import logging
from typing import Callable, Iterable, Sequence

import numpy as np

from iabench.core.records import IAPair
from iabench.errors import ProviderError

logger = logging.getLogger(__name__)

EmbedFn = Callable[[Sequence[str]], "list"]


def embedding_text(pair: IAPair) -> str:
    return f"{pair.instruction.text}\n{pair.answer.text}"


def _vector_values(vector) -> list[float]:
    return list(getattr(vector, "values", vector))


def _embed_with_fallback(texts: list[str], embed: EmbedFn) -> list[list[float] | None]:
    """Batch embed; on failure retry text-by-text so one bad input costs one pair."""
    try:
        return [_vector_values(v) for v in embed(texts)]
    except ProviderError as exc:
        logger.warning("batch embedding failed (%s); retrying per pair", exc)
    out: list[list[float] | None] = []
    for text in texts:
        try:
            out.append(_vector_values(embed([text])[0]))
        except ProviderError as exc:
            logger.warning("embedding failed for one pair: %s", exc)
            out.append(None)
    return out


def dve(pairs: Iterable[IAPair], threshold: float,
        embed: EmbedFn) -> tuple[list[IAPair], list[IAPair]]:
    """Greedy keep-first diversity filter; returns (kept, dropped)."""
    pairs = list(pairs)
    if not pairs:
        return [], []
    vectors = _embed_with_fallback([embedding_text(p) for p in pairs], embed)

    dimensions = {len(v) for v in vectors if v is not None}
    if len(dimensions) > 1:
        raise ProviderError(f"embedding dimensions differ within one pass: {dimensions}")

    kept: list[IAPair] = []
    dropped: list[IAPair] = []
    kept_by_group: dict[str, list[tuple[str, np.ndarray]]] = {}
    for pair, values in zip(pairs, vectors):
        if values is None:
            pair.dve_status = "dropped"
            pair.dve_drop_reason = "embed_error"
            dropped.append(pair)
            continue
        vector = np.asarray(values, dtype=np.float64)
        norm = np.linalg.norm(vector)
        if norm > 0:
            vector = vector / norm
        pair.embedding = [float(x) for x in vector]
        group = pair.instruction.question_type_id
        previously_kept = kept_by_group.setdefault(group, [])
        if previously_kept:
            matrix = np.stack([v for _, v in previously_kept])
            distances = 1.0 - matrix @ vector
            min_index = int(np.argmin(distances))
            min_distance = float(distances[min_index])
            if min_distance < threshold:
                pair.dve_status = "dropped"
                pair.dve_min_distance = min_distance
                pair.dve_conflicting_pair_id = previously_kept[min_index][0]
                dropped.append(pair)
                continue
        previously_kept.append((pair.pair_id, vector))
        pair.dve_status = "kept"
        kept.append(pair)
    return kept, dropped
