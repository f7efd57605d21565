"""Run manifests: fixed stage sequencing, status transitions, persistence."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from iabench.errors import RecordError, SequencingError

STAGE_ORDER = ("topics", "topic_filter", "instructions", "dfe", "answers", "dve")
STAGE_STATUSES = ("pending", "complete", "failed")

MANIFEST_FILENAME = "manifest.json"
CONFIG_FILENAME = "config.json"
DATASET_FILENAME = "dataset.jsonl"

# Statuses only ever advance; "complete" is terminal.
_ALLOWED_TRANSITIONS = {
    ("pending", "complete"),
    ("pending", "failed"),
    ("failed", "complete"),
    ("failed", "failed"),
}


@dataclass
class StageState:
    stage_name: str
    status: str = "pending"
    output_path: str | None = None
    record_count: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage_name": self.stage_name,
            "status": self.status,
            "output_path": self.output_path,
            "record_count": self.record_count,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StageState":
        state = cls(
            stage_name=data["stage_name"],
            status=data["status"],
            output_path=data.get("output_path"),
            record_count=data.get("record_count"),
        )
        if state.status not in STAGE_STATUSES:
            raise RecordError(f"StageState: unknown status '{state.status}'")
        return state


@dataclass
class RunManifest:
    run_id: str
    config_hash: str
    stage_states: list[StageState]
    random_seed: int

    @classmethod
    def new(cls, run_id: str, config_hash: str, random_seed: int) -> "RunManifest":
        return cls(
            run_id=run_id,
            config_hash=config_hash,
            stage_states=[StageState(stage_name=name) for name in STAGE_ORDER],
            random_seed=random_seed,
        )

    def stage(self, stage_name: str) -> StageState:
        for state in self.stage_states:
            if state.stage_name == stage_name:
                return state
        raise SequencingError(f"unknown stage '{stage_name}'")

    def next_incomplete(self) -> str | None:
        """First stage that is not complete, or None when the run is done."""
        for state in self.stage_states:
            if state.status != "complete":
                return state.stage_name
        return None

    def mark_stage(self, stage_name: str, status: str,
                   output_path: str | None = None,
                   record_count: int | None = None) -> None:
        state = self.stage(stage_name)
        if (state.status, status) not in _ALLOWED_TRANSITIONS:
            raise SequencingError(
                f"stage '{stage_name}' cannot move {state.status} -> {status}")
        state.status = status
        if output_path is not None:
            state.output_path = output_path
        if record_count is not None:
            state.record_count = record_count

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "config_hash": self.config_hash,
            "random_seed": self.random_seed,
            "stage_states": [s.to_dict() for s in self.stage_states],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        manifest = cls(
            run_id=data["run_id"],
            config_hash=data["config_hash"],
            stage_states=[StageState.from_dict(s) for s in data["stage_states"]],
            random_seed=data["random_seed"],
        )
        names = tuple(s.stage_name for s in manifest.stage_states)
        if names != STAGE_ORDER:
            raise RecordError(f"RunManifest: stage order {names} != {STAGE_ORDER}")
        return manifest


def atomic_write_text(path: Path, content: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def manifest_path(run_dir: Path) -> Path:
    return Path(run_dir) / MANIFEST_FILENAME


def stage_output_path(run_dir: Path, stage_name: str) -> Path:
    return Path(run_dir) / "stages" / f"{stage_name}.jsonl"


def save_manifest(run_dir: Path, manifest: RunManifest) -> None:
    atomic_write_text(manifest_path(run_dir),
                      json.dumps(manifest.to_dict(), indent=2, ensure_ascii=False) + "\n")


def load_manifest(run_dir: Path) -> RunManifest:
    path = manifest_path(run_dir)
    if not path.exists():
        raise FileNotFoundError(f"no manifest at {path}")
    return RunManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
