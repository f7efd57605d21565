"""Per-criterion LLM-as-a-judge scoring with threshold gating."""

from iabench.judge.criteria import BUILTIN_SETS, load_criteria
from iabench.judge.geval import (
    GATE_MODES,
    JUDGE_TEMPERATURE,
    geval,
    judge_criterion,
    passes,
    render_judge_prompt,
)

__all__ = [
    "BUILTIN_SETS",
    "GATE_MODES",
    "JUDGE_TEMPERATURE",
    "geval",
    "judge_criterion",
    "load_criteria",
    "passes",
    "render_judge_prompt",
]
