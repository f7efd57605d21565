"""Pipeline orchestration: stage sequencing, checkpoints, crash recovery.

Every stage reads its inputs back from the previous stage's JSONL file, so a
fresh run and a resumed run execute identical code paths. With the mock
provider (responses are pure functions of seed and prompt) this makes final
outputs byte-identical across reruns and resumes.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from iabench.core.manifest import (
    CONFIG_FILENAME,
    DATASET_FILENAME,
    STAGE_ORDER,
    RunManifest,
    atomic_write_text,
    load_manifest,
    save_manifest,
    stage_output_path,
)
from iabench.core.records import Answer, IAPair, Instruction, Topic
from iabench.core.storage import encode_records, read_stage_file, save_stage, load_stage
from iabench.errors import (
    IntegrityError,
    PipelineError,
    RunConflictError,
    StageError,
)
from iabench.genpipe.answers import answer_feedback_loop, generate_answer
from iabench.genpipe.config import PipelineConfig, derive_seed
from iabench.genpipe.dfe import dfe
from iabench.genpipe.dve import dve
from iabench.genpipe.instructions import generate_instruction_batch, instruction_feedback_loop
from iabench.genpipe.topics import filter_topics, generate_topics
from iabench.provider.base import Provider

logger = logging.getLogger(__name__)


def new_run(config: PipelineConfig, seed: int, run_dir: Path) -> RunManifest:
    """Create (or resume) a run directory with a config snapshot and manifest.

    A second call with an identical config resumes; a different config in the
    same directory is a conflict.
    """
    config.validate()
    run_dir = Path(run_dir)
    config_hash = config.config_hash()
    manifest_file = run_dir / "manifest.json"
    if manifest_file.exists():
        manifest = load_manifest(run_dir)
        if manifest.config_hash != config_hash:
            raise RunConflictError(
                f"run directory {run_dir} holds config hash "
                f"{manifest.config_hash[:12]}..., new config hashes to {config_hash[:12]}...")
        if manifest.random_seed != seed:
            raise RunConflictError(
                f"run directory {run_dir} was seeded with {manifest.random_seed}, not {seed}")
        return manifest
    manifest = RunManifest.new(run_id=f"run-{config_hash[:12]}-{seed}",
                               config_hash=config_hash, random_seed=seed)
    atomic_write_text(run_dir / CONFIG_FILENAME,
                      json.dumps(config.to_dict(), indent=2, ensure_ascii=False) + "\n")
    save_manifest(run_dir, manifest)
    return manifest


def load_run_config(run_dir: Path) -> PipelineConfig:
    path = Path(run_dir) / CONFIG_FILENAME
    if not path.exists():
        raise FileNotFoundError(f"no config snapshot at {path}")
    return PipelineConfig.from_dict(json.loads(path.read_text(encoding="utf-8")))


class PipelineRunner:
    def __init__(self, config: PipelineConfig, seed: int, run_dir: Path,
                 provider: Provider) -> None:
        self.config = config
        self.seed = seed
        self.run_dir = Path(run_dir)
        self.provider = provider

    def run(self, halt_after: str | None = None) -> Path | None:
        """Execute pending stages in order; returns the final dataset path.

        ``halt_after`` stops the run right after checkpointing that stage
        (the manifest stays resumable); the return value is then None.
        """
        manifest = new_run(self.config, self.seed, self.run_dir)
        for stage_name in STAGE_ORDER:
            state = manifest.stage(stage_name)
            if state.status == "complete":
                continue
            if not self._repair_stage(manifest, stage_name):
                try:
                    records = self._compute_stage(manifest, stage_name)
                except Exception as exc:
                    manifest.mark_stage(stage_name, "failed")
                    save_manifest(self.run_dir, manifest)
                    raise PipelineError(stage_name, str(exc)) from exc
                save_stage(self.run_dir, manifest, stage_name, records)
            if halt_after == stage_name:
                return None
        return self._write_dataset(manifest)

    def _repair_stage(self, manifest: RunManifest, stage_name: str) -> bool:
        """Recover a stage whose data file landed but whose manifest update
        did not (crash between the two writes). Atomic renames mean any
        existing file is complete; re-validate its count and repair."""
        if manifest.stage(stage_name).status != "pending":
            return False
        path = stage_output_path(self.run_dir, stage_name)
        if not path.exists():
            return False
        try:
            records = read_stage_file(path, stage_name)
        except IntegrityError as exc:
            logger.warning("stage '%s' file unusable (%s); recomputing", stage_name, exc)
            return False
        logger.info("repaired manifest for stage '%s' (%d records)", stage_name, len(records))
        manifest.mark_stage(stage_name, "complete",
                            output_path=str(path.relative_to(self.run_dir)),
                            record_count=len(records))
        save_manifest(self.run_dir, manifest)
        return True

    # ------------------------------------------------------------------
    # Stage computations (inputs always loaded from the previous checkpoint)
    # ------------------------------------------------------------------

    def _compute_stage(self, manifest: RunManifest, stage_name: str) -> list:
        compute = getattr(self, f"_stage_{stage_name}")
        return compute(manifest)

    def _stage_topics(self, manifest: RunManifest) -> list[Topic]:
        records: list[Topic] = []
        for qt in self.config.question_types:
            try:
                records.extend(generate_topics(self.provider, self.config, qt,
                                               self.config.topics_per_qt))
            except StageError as exc:
                logger.warning("skipping question type '%s': %s", qt.id, exc)
        return records

    def _stage_topic_filter(self, manifest: RunManifest) -> list[Topic]:
        topics = load_stage(self.run_dir, manifest, "topics")
        records: list[Topic] = []
        for qt in self.config.question_types:
            qt_topics = [t for t in topics if t.question_type_id == qt.id]
            if qt_topics:
                records.extend(filter_topics(self.provider, self.config, qt_topics, qt))
        return records

    def _stage_instructions(self, manifest: RunManifest) -> list[Instruction]:
        topics = load_stage(self.run_dir, manifest, "topic_filter")
        records: list[Instruction] = []
        for qt in self.config.question_types:
            retained = [t for t in topics
                        if t.question_type_id == qt.id and t.status == "retained"]
            if len(retained) < self.config.topics_sampled:
                logger.warning("question type '%s' has %d retained topics, need %d; skipping",
                               qt.id, len(retained), self.config.topics_sampled)
                continue
            seen: set[str] = set()
            for iteration in range(self.config.iterations):
                round_seed = derive_seed(self.seed, "instructions", qt.id, str(iteration))
                try:
                    batch = generate_instruction_batch(self.provider, self.config,
                                                       retained, qt, iteration, round_seed)
                except StageError as exc:
                    logger.warning("iteration %d for '%s' failed: %s", iteration, qt.id, exc)
                    continue
                unique_batch: list[Instruction] = []
                for item in batch:
                    key = item.text.strip().lower()
                    if key in seen:
                        item.status = "discarded"
                        item.discard_reason = "duplicate"
                        records.append(item)
                        continue
                    seen.add(key)
                    unique_batch.append(item)
                if not unique_batch:
                    continue
                topic_texts = list(unique_batch[0].topic_ids)
                retained_items, discarded_items = instruction_feedback_loop(
                    self.provider, self.config, unique_batch, qt, topic_texts)
                records.extend(retained_items)
                records.extend(discarded_items)
        return records

    def _stage_dfe(self, manifest: RunManifest) -> list[Instruction]:
        instructions = load_stage(self.run_dir, manifest, "instructions")
        active = [i for i in instructions if i.status == "active"]
        return dfe(self.provider, self.config, active, self.config.question_types)

    def _stage_answers(self, manifest: RunManifest) -> list[Answer]:
        instructions = load_stage(self.run_dir, manifest, "dfe")
        active = [i for i in instructions if i.status == "active"]
        failed: list[Answer] = []
        pairs: list[tuple[Instruction, Answer]] = []
        for instruction in active:
            answer = generate_answer(self.provider, self.config, instruction)
            if answer.status == "active":
                pairs.append((instruction, answer))
            else:
                failed.append(answer)
        retained, discarded = answer_feedback_loop(self.provider, self.config, pairs)
        by_id = {a.instruction_id: a for a in retained + discarded + failed}
        return [by_id[i.id] for i in active if i.id in by_id]

    def _stage_dve(self, manifest: RunManifest) -> list[IAPair]:
        instructions = {i.id: i for i in load_stage(self.run_dir, manifest, "dfe")
                        if i.status == "active"}
        answers = [a for a in load_stage(self.run_dir, manifest, "answers")
                   if a.status == "active"]
        pairs = [IAPair(instruction=instructions[a.instruction_id], answer=a)
                 for a in answers if a.instruction_id in instructions]
        if not self.config.dve_enabled:
            return pairs
        embed = lambda texts: self.provider.embed(texts, self.config.embedding_model)
        kept, dropped = dve(pairs, self.config.dve_threshold, embed)
        by_id = {p.pair_id: p for p in kept + dropped}
        return [by_id[p.pair_id] for p in pairs]

    def _write_dataset(self, manifest: RunManifest) -> Path:
        pairs = load_stage(self.run_dir, manifest, "dve")
        kept = [p for p in pairs if p.dve_status == "kept"]
        dataset_path = self.run_dir / DATASET_FILENAME
        atomic_write_text(dataset_path, encode_records(kept))
        logger.info("dataset written: %d pairs -> %s", len(kept), dataset_path)
        return dataset_path


def run_pipeline(config: PipelineConfig, seed: int, run_dir: Path,
                 provider: Provider, halt_after: str | None = None) -> Path | None:
    return PipelineRunner(config, seed, run_dir, provider).run(halt_after=halt_after)


def resume_run(run_dir: Path, provider: Provider) -> Path | None:
    """Continue a run from its first incomplete stage.

    Refuses when the stored config snapshot no longer matches the manifest's
    config hash (i.e. the snapshot was edited).
    """
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    config = load_run_config(run_dir)
    if config.config_hash() != manifest.config_hash:
        raise RunConflictError(
            f"config snapshot hash {config.config_hash()[:12]}... does not match "
            f"manifest hash {manifest.config_hash[:12]}...; refusing to resume")
    return PipelineRunner(config, manifest.random_seed, run_dir, provider).run()
