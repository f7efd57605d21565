"""Model-under-test evaluation, scoring, and delta reporting."""

from iabench.evalpipe.report import (
    DEFAULT_RANGE_MAX,
    METRIC_ORDER,
    DeltaReport,
    EvaluationReport,
    MetricDelta,
    PairRow,
    compare,
    render_report,
)
from iabench.evalpipe.runner import (
    DatasetPair,
    load_dataset,
    run_model_under_test,
    score_report,
)

__all__ = [
    "DEFAULT_RANGE_MAX",
    "DatasetPair",
    "DeltaReport",
    "EvaluationReport",
    "METRIC_ORDER",
    "MetricDelta",
    "PairRow",
    "compare",
    "load_dataset",
    "render_report",
    "run_model_under_test",
    "score_report",
]
