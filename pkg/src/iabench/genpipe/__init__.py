"""The six-stage synthetic instruction-answer generation pipeline."""

from iabench.genpipe.answers import answer_feedback_loop, generate_answer
from iabench.genpipe.config import DEFAULT_INSTRUCTION_TYPES, PipelineConfig, derive_seed
from iabench.genpipe.dfe import dfe
from iabench.genpipe.dve import dve, embedding_text
from iabench.genpipe.instructions import (
    generate_instruction_batch,
    instruction_feedback_loop,
    sample_topics,
)
from iabench.genpipe.run import (
    PipelineRunner,
    load_run_config,
    new_run,
    resume_run,
    run_pipeline,
)
from iabench.genpipe.topics import filter_topics, generate_topics

__all__ = [
    "DEFAULT_INSTRUCTION_TYPES",
    "PipelineConfig",
    "PipelineRunner",
    "answer_feedback_loop",
    "derive_seed",
    "dfe",
    "dve",
    "embedding_text",
    "filter_topics",
    "generate_answer",
    "generate_instruction_batch",
    "generate_topics",
    "instruction_feedback_loop",
    "load_run_config",
    "new_run",
    "resume_run",
    "run_pipeline",
    "sample_topics",
]
