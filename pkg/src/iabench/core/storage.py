"""JSONL stage persistence and seeded sampling.

One record per line, UTF-8, canonical field order. Writes are atomic
(temp file + rename) and the manifest is only updated after the data file
is safely on disk, so a crash between the two leaves a repairable state.
"""

from __future__ import annotations

import json
import logging
import random
from pathlib import Path
from typing import Any, Sequence

from iabench.core.manifest import (
    RunManifest,
    atomic_write_text,
    save_manifest,
    stage_output_path,
)
from iabench.core.records import Answer, IAPair, Instruction, Topic
from iabench.errors import IntegrityError, RecordError, SampleSizeError, SequencingError

logger = logging.getLogger(__name__)

# Record codec per stage output.
STAGE_RECORD_TYPES = {
    "topics": Topic,
    "topic_filter": Topic,
    "instructions": Instruction,
    "dfe": Instruction,
    "answers": Answer,
    "dve": IAPair,
}


def encode_record(record: Any) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def encode_records(records: Sequence[Any]) -> str:
    return "".join(encode_record(r) + "\n" for r in records)


def save_stage(run_dir: Path, manifest: RunManifest, stage_name: str,
               records: Sequence[Any]) -> RunManifest:
    """Persist a stage's records and mark the stage complete.

    The stage must be the next incomplete one in the fixed order.
    """
    run_dir = Path(run_dir)
    expected = manifest.next_incomplete()
    if stage_name != expected:
        raise SequencingError(
            f"cannot save stage '{stage_name}'; next incomplete stage is '{expected}'")
    if not records:
        logger.warning("stage '%s' saved with zero records", stage_name)

    path = stage_output_path(run_dir, stage_name)
    atomic_write_text(path, encode_records(records))
    manifest.mark_stage(stage_name, "complete",
                        output_path=str(path.relative_to(run_dir)),
                        record_count=len(records))
    save_manifest(run_dir, manifest)
    return manifest


def load_stage(run_dir: Path, manifest: RunManifest, stage_name: str) -> list[Any]:
    """Load a completed stage's records; errors carry the first bad line number."""
    state = manifest.stage(stage_name)
    if state.status != "complete":
        raise SequencingError(f"stage '{stage_name}' is {state.status}, not complete")
    records = read_stage_file(stage_output_path(Path(run_dir), stage_name), stage_name)
    if state.record_count is not None and len(records) != state.record_count:
        raise IntegrityError(
            f"stage '{stage_name}' has {len(records)} records, manifest says {state.record_count}")
    return records


def read_stage_file(path: Path, stage_name: str) -> list[Any]:
    record_type = STAGE_RECORD_TYPES[stage_name]
    if not path.exists():
        raise IntegrityError(f"stage file missing: {path}")
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                raise IntegrityError(f"empty line in {path}", line_number=line_number)
            try:
                records.append(record_type.from_dict(json.loads(line)))
            except (json.JSONDecodeError, RecordError, KeyError, TypeError) as exc:
                raise IntegrityError(f"malformed record in {path}: {exc}",
                                     line_number=line_number) from exc
    return records


def sample_records(records: Sequence[Any], n: int, seed: int) -> list[Any]:
    """Uniform sample without replacement, preserving original order."""
    if n > len(records):
        raise SampleSizeError(f"cannot sample {n} from {len(records)} records")
    rng = random.Random(seed)
    picks = sorted(rng.sample(range(len(records)), n))
    return [records[i] for i in picks]
