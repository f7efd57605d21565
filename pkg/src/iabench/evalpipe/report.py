"""Evaluation reports, pairwise delta computation, and table rendering.

Deltas are expressed in percentage points of each metric's range:
delta_pp = (cmp - ref) / range_max * 100, with range 10 for the judge-based
columns and 1 for the [0, 1] metrics (configurable per metric).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from iabench.errors import ComparisonError, UsageError

# Canonical metric order for reports and rendered tables.
METRIC_ORDER = ("geval", "accuracy", "relevance", "completeness",
                "rouge_l", "semantic_f1", "answer_relevance")

DEFAULT_RANGE_MAX = {
    "geval": 10.0,
    "accuracy": 10.0,
    "relevance": 10.0,
    "completeness": 10.0,
    "rouge_l": 1.0,
    "semantic_f1": 1.0,
    "answer_relevance": 1.0,
}

_COLUMN_LABELS = {
    "geval": "G-Eval",
    "accuracy": "Acc.",
    "relevance": "Rel.",
    "completeness": "Compl.",
    "rouge_l": "Rouge-L",
    "semantic_f1": "Semantic F1",
    "answer_relevance": "AR",
}


@dataclass
class PairRow:
    pair_id: str
    instruction: str
    golden_answer: str
    model_answer: str | None
    language: str
    metrics: dict[str, float] = field(default_factory=dict)
    geval_scores: dict[str, int] = field(default_factory=dict)
    geval_reasons: dict[str, str] = field(default_factory=dict)
    geval_overall: float | None = None
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "pair_id": self.pair_id,
            "instruction": self.instruction,
            "golden_answer": self.golden_answer,
            "model_answer": self.model_answer,
            "language": self.language,
            "metrics": dict(self.metrics),
            "geval_scores": dict(self.geval_scores),
            "geval_reasons": dict(self.geval_reasons),
            "geval_overall": self.geval_overall,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PairRow":
        return cls(
            pair_id=data["pair_id"],
            instruction=data["instruction"],
            golden_answer=data["golden_answer"],
            model_answer=data.get("model_answer"),
            language=data.get("language", ""),
            metrics=dict(data.get("metrics", {})),
            geval_scores=dict(data.get("geval_scores", {})),
            geval_reasons=dict(data.get("geval_reasons", {})),
            geval_overall=data.get("geval_overall"),
            error=data.get("error"),
        )


@dataclass
class EvaluationReport:
    dataset_id: str
    model_under_test: str
    rows: list[PairRow]
    aggregates: dict[str, float]
    errored_pairs: int = 0
    invalid: bool = False
    range_max: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_RANGE_MAX))

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "model_under_test": self.model_under_test,
            "aggregates": dict(self.aggregates),
            "errored_pairs": self.errored_pairs,
            "invalid": self.invalid,
            "range_max": dict(self.range_max),
            "rows": [row.to_dict() for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EvaluationReport":
        return cls(
            dataset_id=data["dataset_id"],
            model_under_test=data["model_under_test"],
            rows=[PairRow.from_dict(r) for r in data.get("rows", [])],
            aggregates=dict(data["aggregates"]),
            errored_pairs=data.get("errored_pairs", 0),
            invalid=data.get("invalid", False),
            range_max=dict(data.get("range_max", DEFAULT_RANGE_MAX)),
        )

    @classmethod
    def load(cls, path) -> "EvaluationReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class MetricDelta:
    metric: str
    ref_value: float
    cmp_value: float
    delta_pp: float


@dataclass
class DeltaReport:
    reference_id: str
    comparison_id: str
    deltas: list[MetricDelta]

    def delta_for(self, metric: str) -> MetricDelta:
        for delta in self.deltas:
            if delta.metric == metric:
                return delta
        raise KeyError(metric)


def _ordered_metrics(keys) -> list[str]:
    ordered = [m for m in METRIC_ORDER if m in keys]
    ordered.extend(sorted(k for k in keys if k not in METRIC_ORDER))
    return ordered


def compare(report_ref: EvaluationReport, report_cmp: EvaluationReport,
            range_max: dict[str, float] | None = None) -> DeltaReport:
    """Pairwise deltas in percentage points of each metric's range."""
    ref_keys = set(report_ref.aggregates)
    cmp_keys = set(report_cmp.aggregates)
    if ref_keys != cmp_keys:
        raise ComparisonError(
            f"metric sets differ: only-ref={sorted(ref_keys - cmp_keys)} "
            f"only-cmp={sorted(cmp_keys - ref_keys)}")
    ranges = dict(DEFAULT_RANGE_MAX)
    ranges.update(report_ref.range_max)
    if range_max:
        ranges.update(range_max)
    deltas = []
    for metric in _ordered_metrics(ref_keys):
        ref_value = report_ref.aggregates[metric]
        cmp_value = report_cmp.aggregates[metric]
        span = ranges.get(metric, 1.0)
        deltas.append(MetricDelta(metric=metric, ref_value=ref_value, cmp_value=cmp_value,
                                  delta_pp=(cmp_value - ref_value) / span * 100.0))
    return DeltaReport(reference_id=report_ref.dataset_id,
                       comparison_id=report_cmp.dataset_id, deltas=deltas)


def _format_value(value: float) -> str:
    return f"{value:g}"


def render_report(report: "EvaluationReport | DeltaReport", fmt: str) -> str:
    """Render a report or delta report as a Markdown or CSV table."""
    if fmt not in ("markdown", "csv"):
        raise UsageError(f"unknown report format '{fmt}' (use 'markdown' or 'csv')")
    if isinstance(report, DeltaReport):
        return _render_delta(report, fmt)
    if isinstance(report, EvaluationReport):
        return _render_evaluation(report, fmt)
    raise UsageError(f"cannot render object of type {type(report).__name__}")


def _render_evaluation(report: EvaluationReport, fmt: str) -> str:
    metrics = _ordered_metrics(report.aggregates)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["dataset", "model"] + metrics + ["errored_pairs"])
        writer.writerow([report.dataset_id, report.model_under_test]
                        + [report.aggregates[m] for m in metrics]
                        + [report.errored_pairs])
        return buffer.getvalue()
    labels = [_COLUMN_LABELS.get(m, m) for m in metrics]
    lines = [
        "| Dataset | Model | " + " | ".join(labels) + " |",
        "|---|---|" + "---|" * len(metrics),
        f"| {report.dataset_id} | {report.model_under_test} | "
        + " | ".join(_format_value(report.aggregates[m]) for m in metrics) + " |",
    ]
    if report.invalid:
        lines.append("")
        lines.append("*Report invalid: every pair errored; aggregates are undefined.*")
    elif report.errored_pairs:
        lines.append("")
        lines.append(f"*{report.errored_pairs} pair(s) excluded from aggregates due to errors.*")
    return "\n".join(lines) + "\n"


def _render_delta(report: DeltaReport, fmt: str) -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["metric", "ref_value", "cmp_value", "delta_pp"])
        for delta in report.deltas:
            writer.writerow([delta.metric, delta.ref_value, delta.cmp_value, delta.delta_pp])
        return buffer.getvalue()
    labels = [_COLUMN_LABELS.get(d.metric, d.metric) for d in report.deltas]
    ref_cells = [_format_value(d.ref_value) for d in report.deltas]
    cmp_cells = [f"{_format_value(d.cmp_value)} | {d.delta_pp:+.1f}%" for d in report.deltas]
    lines = [
        "| Dataset | " + " | ".join(labels) + " |",
        "|---|" + "---|" * len(report.deltas),
        f"| {report.reference_id} | " + " | ".join(ref_cells) + " |",
        f"| {report.comparison_id} | " + " | ".join(cmp_cells) + " |",
    ]
    return "\n".join(lines) + "\n"
