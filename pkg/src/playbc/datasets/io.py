"""Disk ingestion and emission of frame corpora.

Directory layout (bit-exact contract):

    <root>/manifest.json                      schema_version, dataset_id,
                                              counts, trajectories[] {id,
                                              n_frames, checksum}
    <root>/trajectories/<id>/frames/%06d.jpg  zero-padded, 0-based index
    <root>/trajectories/<id>/actions.csv      optional; rows "dx,dy,dz",
                                              row i = transition i -> i+1,
                                              no header
    <root>/trajectories/<id>/meta.json        collector, location, duration_s

All JSON is UTF-8. The per-trajectory checksum is the sha256 over the raw
bytes of every frame file in index order, followed by actions.csv bytes when
present; meta.json is excluded.
"""

from __future__ import annotations

import hashlib
import io as _stdio
import json
import logging
from pathlib import Path

import numpy as np
from PIL import Image

from playbc.datasets.types import (
    MANIFEST_SCHEMA_VERSION,
    DatasetManifest,
    DemoDataset,
    ManifestEntry,
    PlayDataset,
    Trajectory,
    TrajectoryMeta,
)
from playbc.errors import IntegrityError, ManifestError, SchemaError, ValidationError

log = logging.getLogger(__name__)

JPEG_QUALITY = 95  # fixed so re-encoding a rendered frame is byte-stable


def _decode_rgb(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def encode_jpeg(frame_u8: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array with the corpus-wide JPEG settings."""
    buf = _stdio.BytesIO()
    Image.fromarray(frame_u8, mode="RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
    return buf.getvalue()


class DiskFrames:
    """Lazily decoded frames backed by JPEG files."""

    def __init__(self, paths: list[Path]):
        self._paths = paths

    def __len__(self) -> int:
        return len(self._paths)

    def get(self, index: int) -> np.ndarray:
        return _decode_rgb(self._paths[index]).astype(np.float32) / 255.0

    def get_raw(self, index: int) -> np.ndarray:
        return _decode_rgb(self._paths[index])

    @property
    def paths(self) -> list[Path]:
        return self._paths


def _frame_paths(traj_dir: Path) -> list[Path]:
    frames_dir = traj_dir / "frames"
    if not frames_dir.is_dir():
        raise IntegrityError(f"{traj_dir}: missing frames/ directory")
    paths = sorted(frames_dir.glob("*.jpg"))
    for i, p in enumerate(paths):
        if p.name != f"{i:06d}.jpg":
            raise IntegrityError(f"{traj_dir}: frame files not contiguous at index {i} ({p.name})")
    return paths


def _trajectory_checksum(traj_dir: Path, paths: list[Path]) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(p.read_bytes())
    actions = traj_dir / "actions.csv"
    if actions.exists():
        h.update(actions.read_bytes())
    return h.hexdigest()


def manifest_bytes(manifest: DatasetManifest) -> bytes:
    """Canonical serialization; regenerating from disk must reproduce it."""
    return (json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")


def build_manifest(root: str | Path, dataset_id: str) -> DatasetManifest:
    """Scan a corpus directory and compute its manifest from scratch."""
    root = Path(root)
    traj_root = root / "trajectories"
    if not traj_root.is_dir():
        raise IntegrityError(f"{root}: missing trajectories/ directory")
    entries = []
    for traj_dir in sorted(traj_root.iterdir()):
        if not traj_dir.is_dir():
            continue
        paths = _frame_paths(traj_dir)
        entries.append(
            ManifestEntry(
                id=traj_dir.name,
                n_frames=len(paths),
                checksum=_trajectory_checksum(traj_dir, paths),
            )
        )
    return DatasetManifest(dataset_id=dataset_id, trajectories=tuple(entries))


def write_manifest(root: str | Path, manifest: DatasetManifest) -> Path:
    path = Path(root) / "manifest.json"
    path.write_bytes(manifest_bytes(manifest))
    return path


def read_manifest(root: str | Path) -> DatasetManifest:
    path = Path(root) / "manifest.json"
    if not path.exists():
        raise ManifestError(f"no manifest.json under {root}")
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
        manifest = DatasetManifest.from_dict(d)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ManifestError(f"unreadable manifest at {path}: {e}") from e
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION:
        raise ManifestError(
            f"manifest schema version {manifest.schema_version} unsupported "
            f"(expected {MANIFEST_SCHEMA_VERSION})"
        )
    return manifest


def _read_meta(traj_dir: Path) -> TrajectoryMeta:
    path = traj_dir / "meta.json"
    if not path.exists():
        return TrajectoryMeta()
    d = json.loads(path.read_text(encoding="utf-8"))
    return TrajectoryMeta(
        collector=d.get("collector", ""),
        location=d.get("location", ""),
        duration_s=float(d.get("duration_s", 0.0)),
    )


def _read_actions(traj_dir: Path, n_frames: int) -> np.ndarray:
    path = traj_dir / "actions.csv"
    if not path.exists():
        raise SchemaError(f"{traj_dir}: missing actions.csv")
    rows = []
    for ln, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{path}:{ln + 1}: expected 3 comma-separated values")
        rows.append([float(v) for v in parts])
    actions = np.asarray(rows, dtype=np.float64).reshape(-1, 3)
    if actions.shape[0] != n_frames - 1:
        raise SchemaError(
            f"{path}: {actions.shape[0]} action rows for {n_frames} frames "
            f"(need n_frames - 1 = {n_frames - 1})"
        )
    if not np.isfinite(actions).all():
        raise ValidationError(f"{path}: non-finite action component")
    return actions


def _load_trajectories(root: Path, manifest: DatasetManifest, with_actions: bool) -> list[Trajectory]:
    traj_root = root / "trajectories"
    on_disk = sorted(p.name for p in traj_root.iterdir() if p.is_dir()) if traj_root.is_dir() else []
    manifest_ids = [e.id for e in manifest.trajectories]
    if set(on_disk) != set(manifest_ids):
        raise IntegrityError(
            f"{root}: manifest lists {len(manifest_ids)} trajectories, disk has "
            f"{len(on_disk)} (manifest-only: {sorted(set(manifest_ids) - set(on_disk))[:5]}, "
            f"disk-only: {sorted(set(on_disk) - set(manifest_ids))[:5]})"
        )
    trajectories = []
    for entry in manifest.trajectories:
        traj_dir = traj_root / entry.id
        paths = _frame_paths(traj_dir)
        if len(paths) != entry.n_frames:
            raise IntegrityError(
                f"{traj_dir}: manifest says {entry.n_frames} frames, disk has {len(paths)}"
            )
        if len(paths) < 2:
            raise IntegrityError(f"{traj_dir}: trajectory has {len(paths)} frame(s); need >= 2")
        actions = _read_actions(traj_dir, len(paths)) if with_actions else None
        trajectories.append(
            Trajectory(
                id=entry.id,
                frames=DiskFrames(paths),
                actions=actions,
                meta=_read_meta(traj_dir),
            )
        )
    return trajectories


def verify_checksums(root: str | Path, manifest: DatasetManifest) -> None:
    root = Path(root)
    for entry in manifest.trajectories:
        traj_dir = root / "trajectories" / entry.id
        actual = _trajectory_checksum(traj_dir, _frame_paths(traj_dir))
        if actual != entry.checksum:
            raise IntegrityError(f"{traj_dir}: checksum mismatch ({actual} != {entry.checksum})")


def load_play_dataset(root: str | Path, check_checksums: bool = False) -> PlayDataset:
    """Load an unlabeled corpus; frames are decoded on demand."""
    root = Path(root)
    manifest = read_manifest(root)
    if check_checksums:
        verify_checksums(root, manifest)
    trajectories = _load_trajectories(root, manifest, with_actions=False)
    return PlayDataset(trajectories=trajectories, manifest=manifest, root=str(root))


def load_demo_dataset(root: str | Path, task: str, check_checksums: bool = False) -> DemoDataset:
    """Load a labeled corpus; every trajectory must carry actions.csv."""
    root = Path(root)
    manifest = read_manifest(root)
    if check_checksums:
        verify_checksums(root, manifest)
    trajectories = _load_trajectories(root, manifest, with_actions=True)
    return DemoDataset(trajectories=trajectories, manifest=manifest, task=task, root=str(root))


def format_actions_csv(actions: np.ndarray) -> str:
    return "".join(f"{dx:.10g},{dy:.10g},{dz:.10g}\n" for dx, dy, dz in actions)


def write_trajectory(
    root: str | Path,
    traj_id: str,
    frames_u8: np.ndarray,
    actions: np.ndarray | None = None,
    meta: TrajectoryMeta | None = None,
) -> None:
    """Write one trajectory in the corpus layout. frames_u8: (N, H, W, 3) uint8."""
    traj_dir = Path(root) / "trajectories" / traj_id
    frames_dir = traj_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    for i in range(frames_u8.shape[0]):
        (frames_dir / f"{i:06d}.jpg").write_bytes(encode_jpeg(frames_u8[i]))
    if actions is not None:
        (traj_dir / "actions.csv").write_text(format_actions_csv(actions), encoding="utf-8")
    meta = meta or TrajectoryMeta()
    (traj_dir / "meta.json").write_text(
        json.dumps(
            {"collector": meta.collector, "location": meta.location, "duration_s": meta.duration_s},
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )


def finalize_corpus(root: str | Path, dataset_id: str) -> DatasetManifest:
    """Compute and write the manifest after all trajectories were written."""
    manifest = build_manifest(root, dataset_id)
    write_manifest(root, manifest)
    return manifest
