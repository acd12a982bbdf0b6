"""Core dataset types: trajectories, corpora, manifests, augmentation config.

Frames are numpy float32 arrays of shape (H, W, 3) with values in [0, 1].
On disk they are 8-bit JPEGs; normalization happens at decode time.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator, Protocol, Sequence

import numpy as np

from playbc.errors import ValidationError

MANIFEST_SCHEMA_VERSION = 1


class FrameSource(Protocol):
    """Ordered, random-access provider of decoded frames."""

    def __len__(self) -> int: ...

    def get(self, index: int) -> np.ndarray: ...


class ArrayFrames:
    """In-memory frames stored as one uint8 array of shape (N, H, W, 3)."""

    def __init__(self, pixels: np.ndarray):
        if pixels.ndim != 4 or pixels.shape[-1] != 3:
            raise ValidationError(f"expected (N, H, W, 3) uint8 array, got {pixels.shape}")
        self._pixels = np.ascontiguousarray(pixels, dtype=np.uint8)

    def __len__(self) -> int:
        return self._pixels.shape[0]

    def get(self, index: int) -> np.ndarray:
        return self._pixels[index].astype(np.float32) / 255.0

    @property
    def raw(self) -> np.ndarray:
        return self._pixels


def validate_frame(frame: np.ndarray) -> np.ndarray:
    """Check the in-memory frame contract: (H, W, 3) float in [0, 1]."""
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValidationError(f"frame must have shape (H, W, 3), got {frame.shape}")
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise ValidationError("frame values must lie in [0, 1]")
    return frame


@dataclass
class TrajectoryMeta:
    collector: str = ""
    location: str = ""
    duration_s: float = 0.0


@dataclass
class Trajectory:
    """Time-ordered frame sequence, optionally with per-transition actions.

    When present, ``actions`` has shape (n_frames - 1, 3): row i is the
    relative end-effector translation between frames i and i + 1.
    """

    id: str
    frames: FrameSource
    actions: np.ndarray | None = None
    meta: TrajectoryMeta = field(default_factory=TrajectoryMeta)

    def __post_init__(self):
        if self.actions is not None:
            self.actions = np.asarray(self.actions, dtype=np.float64)
            if self.actions.ndim != 2 or self.actions.shape[1] != 3:
                raise ValidationError(
                    f"trajectory {self.id!r}: actions must be (n-1, 3), got {self.actions.shape}"
                )
            if self.actions.shape[0] != len(self.frames) - 1:
                raise ValidationError(
                    f"trajectory {self.id!r}: {self.actions.shape[0]} actions for "
                    f"{len(self.frames)} frames (need n_frames - 1)"
                )
            if not np.isfinite(self.actions).all():
                raise ValidationError(f"trajectory {self.id!r}: non-finite action component")

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def frame(self, index: int) -> np.ndarray:
        return self.frames.get(index)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    n_frames: int
    checksum: str


@dataclass(frozen=True)
class DatasetManifest:
    dataset_id: str
    trajectories: tuple[ManifestEntry, ...]
    schema_version: int = MANIFEST_SCHEMA_VERSION

    @property
    def n_trajectories(self) -> int:
        return len(self.trajectories)

    @property
    def n_frames_total(self) -> int:
        return sum(t.n_frames for t in self.trajectories)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "dataset_id": self.dataset_id,
            "n_trajectories": self.n_trajectories,
            "n_frames_total": self.n_frames_total,
            "trajectories": [dataclasses.asdict(t) for t in self.trajectories],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        entries = tuple(
            ManifestEntry(id=t["id"], n_frames=int(t["n_frames"]), checksum=t["checksum"])
            for t in d["trajectories"]
        )
        return cls(
            dataset_id=d["dataset_id"],
            trajectories=entries,
            schema_version=int(d["schema_version"]),
        )


@dataclass
class PlayDataset:
    """Unlabeled interaction corpus; actions, if stored, are ignored."""

    trajectories: list[Trajectory]
    manifest: DatasetManifest
    root: str | None = None

    def __post_init__(self):
        for t in self.trajectories:
            if t.n_frames < 2:
                raise ValidationError(f"trajectory {t.id!r} has fewer than 2 frames")

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories)

    @property
    def n_frames(self) -> int:
        return sum(t.n_frames for t in self.trajectories)

    @property
    def trajectory_ids(self) -> list[str]:
        return [t.id for t in self.trajectories]


@dataclass
class DemoDataset:
    """Expert demonstration corpus; every trajectory carries action labels."""

    trajectories: list[Trajectory]
    manifest: DatasetManifest
    task: str = "push"
    root: str | None = None

    def __post_init__(self):
        for t in self.trajectories:
            if t.actions is None:
                raise ValidationError(f"demo trajectory {t.id!r} has no action labels")

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories)

    @property
    def n_frames(self) -> int:
        return sum(t.n_frames for t in self.trajectories)

    @property
    def n_transitions(self) -> int:
        return sum(t.n_frames - 1 for t in self.trajectories)

    @property
    def trajectory_ids(self) -> list[str]:
        return [t.id for t in self.trajectories]


@dataclass(frozen=True)
class AugmentConfig:
    """Random jitter / crop / rotation settings for training-time augmentation.

    Per-item randomness is derived solely from a stream key
    (seed, trajectory id, frame index, branch tag) via the scheme named in
    ``stream_scheme``, so augmented batches do not depend on worker
    scheduling. See playbc.datasets.augment.
    """

    output_size: int = 224
    brightness: float = 0.4
    contrast: float = 0.4
    saturation: float = 0.4
    crop_scale: tuple[float, float] = (0.6, 1.0)
    rotation_deg: float = 15.0
    enable_jitter: bool = True
    enable_crop: bool = True
    enable_rotation: bool = True
    stream_scheme: str = "blake2b-philox"

    def __post_init__(self):
        lo, hi = self.crop_scale
        if not (0.0 < lo <= hi <= 1.0):
            raise ValidationError(f"crop_scale must satisfy 0 < lo <= hi <= 1, got {self.crop_scale}")
        if not np.isfinite(self.rotation_deg):
            raise ValidationError("rotation_deg must be finite")
        if self.output_size < 1:
            raise ValidationError("output_size must be positive")
        if self.stream_scheme != "blake2b-philox":
            raise ValidationError(f"unknown stream_scheme {self.stream_scheme!r}")

    @classmethod
    def disabled(cls, output_size: int = 224) -> "AugmentConfig":
        """Resize-only configuration (evaluation path)."""
        return cls(
            output_size=output_size,
            enable_jitter=False,
            enable_crop=False,
            enable_rotation=False,
        )


def total_frames(trajectories: Sequence[Trajectory]) -> int:
    return sum(t.n_frames for t in trajectories)
