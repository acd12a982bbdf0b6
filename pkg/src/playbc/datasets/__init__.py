from playbc.datasets.augment import augment_frame, resize_frame, stream_rng
from playbc.datasets.io import (
    build_manifest,
    finalize_corpus,
    load_demo_dataset,
    load_play_dataset,
    manifest_bytes,
    read_manifest,
    verify_checksums,
    write_trajectory,
)
from playbc.datasets.sampling import (
    split_holdout,
    subsample_fraction,
    subsample_trajectories,
    temporal_pairs,
)
from playbc.datasets.types import (
    ArrayFrames,
    AugmentConfig,
    DatasetManifest,
    DemoDataset,
    ManifestEntry,
    PlayDataset,
    Trajectory,
    TrajectoryMeta,
    validate_frame,
)

__all__ = [
    "ArrayFrames",
    "AugmentConfig",
    "DatasetManifest",
    "DemoDataset",
    "ManifestEntry",
    "PlayDataset",
    "Trajectory",
    "TrajectoryMeta",
    "augment_frame",
    "build_manifest",
    "finalize_corpus",
    "load_demo_dataset",
    "load_play_dataset",
    "manifest_bytes",
    "read_manifest",
    "resize_frame",
    "split_holdout",
    "stream_rng",
    "subsample_fraction",
    "subsample_trajectories",
    "temporal_pairs",
    "validate_frame",
    "verify_checksums",
    "write_trajectory",
]
