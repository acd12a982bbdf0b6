"""Append-only registry of completed runs, one JSON object per line.

The registry makes reruns explicit: every training/evaluation command
computes a run id from its canonical configuration (plus the package
version and the identity of the data it consumed) and refuses to repeat a
registered run unless forced. Appends are serialized through a lock file so
concurrent runs on a shared filesystem cannot interleave half-written
lines; lines that are corrupt anyway are skipped with a warning rather
than poisoning every later command.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from playbc import __version__

log = logging.getLogger(__name__)

REGISTRY_NAME = "registry.jsonl"


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    command: str
    seed: int
    status: str = "done"
    config: dict = field(default_factory=dict)
    data_id: str = ""
    artifacts: tuple[str, ...] = ()
    version: str = __version__
    created: str = ""

    def to_json_line(self) -> str:
        d = dataclasses.asdict(self)
        d["artifacts"] = list(self.artifacts)
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["artifacts"] = tuple(d.get("artifacts", ()))
        return cls(**d)


def compute_run_id(command: str, config: dict, data_id: str = "") -> str:
    """Deterministic id for one configured run: 16 hex chars."""
    material = json.dumps(
        {"command": command, "config": config, "data": data_id, "version": __version__},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.blake2b(material.encode("utf-8"), digest_size=8).hexdigest()


def registry_path(runs_dir: str | Path) -> Path:
    return Path(runs_dir) / REGISTRY_NAME


def append_run(runs_dir: str | Path, record: RunRecord) -> Path:
    path = registry_path(runs_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        with open(path, "a", encoding="utf-8") as f:
            f.write(record.to_json_line() + "\n")
    return path


def read_registry(runs_dir: str | Path) -> list[RunRecord]:
    """All parseable records, oldest first; corrupt lines are skipped."""
    path = registry_path(runs_dir)
    if not path.exists():
        return []
    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(RunRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            log.warning("%s:%d: skipping corrupt registry line (%s)", path, lineno, exc)
    return records


def find_run(runs_dir: str | Path, run_id: str) -> RunRecord | None:
    for record in read_registry(runs_dir):
        if record.run_id == run_id:
            return record
    return None


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()
