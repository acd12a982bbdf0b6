"""Held-out action-prediction error.

Evaluation is deterministic: frames are resized (no augmentation), and
transitions are visited in manifest order, time-ascending, batched within a
trajectory. The reported error is the mean over transitions of
||pred - gt||^2 / 3, i.e. the per-component mean squared error; a policy
that always outputs zero on unit-norm actions scores exactly 1/3.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from playbc.datasets import DemoDataset, resize_frame
from playbc.errors import ValidationError


@dataclass
class EvalReport:
    """Evaluation outcome plus the labels needed to place it in a table."""

    mse: float
    n_transitions: int
    task: str = ""
    init_mode: str = ""
    run_id: str = ""
    per_trajectory: dict[str, float] = field(default_factory=dict)

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, text_or_path: str | Path) -> "EvalReport":
        p = Path(text_or_path) if not str(text_or_path).lstrip().startswith("{") else None
        text = p.read_text(encoding="utf-8") if p is not None else str(text_or_path)
        return cls(**json.loads(text))


@torch.no_grad()
def evaluate_mse(
    policy: Callable[[torch.Tensor], torch.Tensor],
    demos: DemoDataset,
    input_size: int = 224,
    batch_size: int = 64,
    task: str = "",
    init_mode: str = "",
    run_id: str = "",
) -> EvalReport:
    """Score a policy on every transition of a labeled dataset."""
    if batch_size < 1:
        raise ValidationError(f"batch_size must be >= 1, got {batch_size}")
    total_sq = 0.0
    total_n = 0
    per_traj: dict[str, float] = {}
    for traj in demos:
        n = traj.n_frames - 1
        sq = 0.0
        for start in range(0, n, batch_size):
            ts = range(start, min(start + batch_size, n))
            frames = np.stack([resize_frame(traj.frame(t), input_size) for t in ts])
            x = torch.from_numpy(frames).permute(0, 3, 1, 2).contiguous()
            pred = policy(x).detach().cpu().numpy().astype(np.float64)
            if pred.shape != (len(ts), 3):
                raise ValidationError(
                    f"policy returned shape {pred.shape}, expected {(len(ts), 3)}"
                )
            gt = traj.actions[ts.start : ts.stop]
            sq += float(((pred - gt) ** 2).sum())
        per_traj[traj.id] = sq / (3.0 * n)
        total_sq += sq
        total_n += n
    return EvalReport(
        mse=total_sq / (3.0 * total_n),
        n_transitions=total_n,
        task=task or demos.task,
        init_mode=init_mode,
        run_id=run_id,
        per_trajectory=per_traj,
    )
