"""Run a model under test over a dataset and score the answers."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from iabench.core.records import IAPair
from iabench.errors import JudgeError, MetricError, ProviderError, UsageError
from iabench.evalpipe.report import DEFAULT_RANGE_MAX, EvaluationReport, PairRow
from iabench.judge import geval, load_criteria
from iabench.metrics import answer_relevance, rouge_l, semantic_f1
from iabench.provider.base import ChatRequest, Provider

logger = logging.getLogger(__name__)

EVAL_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT_TOKENS = 1024


@dataclass
class DatasetPair:
    pair_id: str
    instruction: str
    golden_answer: str
    language: str
    model_answer: str | None = None
    error: str | None = None


def load_dataset(path: Path) -> list[DatasetPair]:
    """Load pairs from the native pair schema or the minimal external form
    ({"instruction", "answer", "language"}), sniffed per line."""
    path = Path(path)
    if not path.exists():
        raise UsageError(f"dataset not found: {path}")
    pairs: list[DatasetPair] = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}:{line_number}: malformed JSON: {exc}") from exc
            try:
                pairs.append(_decode_pair(data, line_number))
            except (KeyError, TypeError) as exc:
                raise UsageError(f"{path}:{line_number}: unrecognized pair schema "
                                 f"({exc})") from exc
    return pairs


def _decode_pair(data: dict, line_number: int) -> DatasetPair:
    if "instruction" in data and isinstance(data["instruction"], dict):
        pair = IAPair.from_dict(data)
        return DatasetPair(pair_id=pair.pair_id, instruction=pair.instruction.text,
                           golden_answer=pair.answer.text,
                           language=pair.instruction.language)
    return DatasetPair(pair_id=str(data.get("id", f"pair-{line_number:05d}")),
                       instruction=str(data["instruction"]),
                       golden_answer=str(data["answer"]),
                       language=str(data.get("language", "English")))


def run_model_under_test(dataset: list[DatasetPair], provider: Provider,
                         model_id: str) -> list[DatasetPair]:
    """One chat call per instruction, the instruction text as the whole prompt."""
    if not dataset:
        logger.warning("evaluating an empty dataset")
    for pair in dataset:
        request = ChatRequest(model_id=model_id, prompt=pair.instruction,
                              temperature=EVAL_TEMPERATURE,
                              max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS)
        try:
            pair.model_answer = provider.chat(request)
        except ProviderError as exc:
            logger.warning("model under test failed on pair %s: %s", pair.pair_id, exc)
            pair.error = f"model_error: {exc}"
    return dataset


def score_report(answered: list[DatasetPair], provider: Provider, judge_model_id: str,
                 embed_model_id: str, dataset_id: str, model_id: str, *,
                 question_count: int = 3) -> EvaluationReport:
    """Score each answered pair with the metric suite plus the meta judge.

    The judge sees instruction, expected answer, and model answer; errored
    pairs are excluded from the aggregates and counted.
    """
    embed = lambda texts: provider.embed(texts, embed_model_id)
    chat = lambda prompt: provider.chat(ChatRequest(
        model_id=judge_model_id, prompt=prompt, temperature=EVAL_TEMPERATURE,
        max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS))

    rows: list[PairRow] = []
    for pair in answered:
        row = PairRow(pair_id=pair.pair_id, instruction=pair.instruction,
                      golden_answer=pair.golden_answer, model_answer=pair.model_answer,
                      language=pair.language, error=pair.error)
        rows.append(row)
        if pair.error is not None or pair.model_answer is None:
            row.error = row.error or "no model answer"
            continue
        criteria = load_criteria("meta", pair.language)
        subject_context = (f"Instruction: {pair.instruction}\n"
                           f"Expected answer: {pair.golden_answer}")
        try:
            row.metrics["rouge_l"] = rouge_l(pair.model_answer, pair.golden_answer).value
            row.metrics["semantic_f1"] = semantic_f1(pair.model_answer,
                                                     pair.golden_answer, embed).value
            row.metrics["answer_relevance"] = answer_relevance(
                pair.instruction, pair.model_answer, chat, embed, k=question_count).value
            result = geval(provider, judge_model_id, subject_context, pair.model_answer,
                           criteria)
        except (MetricError, JudgeError, ProviderError) as exc:
            logger.warning("scoring failed on pair %s: %s", pair.pair_id, exc)
            row.error = f"scoring_error: {exc}"
            row.metrics.clear()
            continue
        for verdict in result.verdicts:
            name = verdict.criterion.parameters[0].lower()
            row.geval_scores[name] = verdict.score
            row.geval_reasons[name] = verdict.reason
        row.geval_overall = result.overall

    scored = [r for r in rows if r.error is None]
    errored = len(rows) - len(scored)
    aggregates: dict[str, float] = {}
    if scored:
        aggregates["geval"] = sum(r.geval_overall for r in scored) / len(scored)
        for name in ("accuracy", "relevance", "completeness"):
            aggregates[name] = sum(r.geval_scores[name] for r in scored) / len(scored)
        for name in ("rouge_l", "semantic_f1", "answer_relevance"):
            aggregates[name] = sum(r.metrics[name] for r in scored) / len(scored)
    invalid = bool(rows) and not scored
    if invalid:
        logger.warning("report invalid: all %d pairs errored", len(rows))
    return EvaluationReport(dataset_id=dataset_id, model_under_test=model_id, rows=rows,
                            aggregates=aggregates, errored_pairs=errored, invalid=invalid,
                            range_max=dict(DEFAULT_RANGE_MAX))
