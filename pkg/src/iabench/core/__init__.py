"""Domain records, run manifests, and JSONL stage persistence."""

from iabench.core.manifest import (
    CONFIG_FILENAME,
    DATASET_FILENAME,
    MANIFEST_FILENAME,
    STAGE_ORDER,
    RunManifest,
    StageState,
    atomic_write_text,
    load_manifest,
    save_manifest,
    stage_output_path,
)
from iabench.core.records import (
    Answer,
    Criterion,
    FeedbackRound,
    GEvalResult,
    IAPair,
    Instruction,
    JudgeVerdict,
    QuestionType,
    Topic,
)
from iabench.core.storage import (
    encode_record,
    encode_records,
    load_stage,
    read_stage_file,
    sample_records,
    save_stage,
)

__all__ = [
    "Answer",
    "CONFIG_FILENAME",
    "Criterion",
    "DATASET_FILENAME",
    "FeedbackRound",
    "GEvalResult",
    "IAPair",
    "Instruction",
    "JudgeVerdict",
    "MANIFEST_FILENAME",
    "QuestionType",
    "RunManifest",
    "STAGE_ORDER",
    "StageState",
    "Topic",
    "atomic_write_text",
    "encode_record",
    "encode_records",
    "load_manifest",
    "load_stage",
    "read_stage_file",
    "sample_records",
    "save_manifest",
    "save_stage",
    "stage_output_path",
]
