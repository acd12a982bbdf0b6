"""Import externally trained classification weights into the canonical layout.

The conversion applies a name map {external name -> conv1..5 name} to a
torch state-dict file (.pt/.pth) or a .npz archive and emits a standard
checkpoint with pretrain_mode="classification". The default map covers the
common five-conv classification backbone whose feature layers live at
features.{0,3,6,8,10}; shapes must match the policy trunk exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from playbc.errors import TransferError
from playbc.models.bundle import CheckpointMeta, WeightBundle
from playbc.models.configs import CONV5_STACK

ALEXNET_NAME_MAP: dict[str, str] = {}
for _i, _layer in enumerate((0, 3, 6, 8, 10), start=1):
    ALEXNET_NAME_MAP[f"features.{_layer}.weight"] = f"conv{_i}.weight"
    ALEXNET_NAME_MAP[f"features.{_layer}.bias"] = f"conv{_i}.bias"


def _expected_shapes() -> dict[str, tuple[int, ...]]:
    shapes = {}
    in_c = 3
    for i, spec in enumerate(CONV5_STACK, start=1):
        shapes[f"conv{i}.weight"] = (spec.out_channels, in_c, spec.kernel, spec.kernel)
        shapes[f"conv{i}.bias"] = (spec.out_channels,)
        in_c = spec.out_channels
    return shapes


def load_name_map(path: str | Path) -> dict[str, str]:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(d, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in d.items()):
        raise TransferError(f"{path}: name map must be a flat string-to-string JSON object")
    return d


def _read_external(path: Path) -> dict[str, np.ndarray]:
    if path.suffix == ".npz":
        with np.load(path) as z:
            return {k: np.asarray(z[k]) for k in z.files}
    state = torch.load(path, map_location="cpu", weights_only=True)
    if hasattr(state, "state_dict"):
        state = state.state_dict()
    return {k: v.detach().cpu().numpy() for k, v in state.items() if isinstance(v, torch.Tensor)}


def convert_external_weights(
    src: str | Path,
    name_map: dict[str, str] | None = None,
    source_dataset: str = "external-classification",
) -> WeightBundle:
    """Map external weights onto conv1..5; unmapped external keys are dropped."""
    src = Path(src)
    name_map = name_map or ALEXNET_NAME_MAP
    external = _read_external(src)
    expected = _expected_shapes()
    arrays: dict[str, np.ndarray] = {}
    for ext_name, canon in sorted(name_map.items()):
        if ext_name not in external:
            continue
        if canon not in expected:
            raise TransferError(f"name map targets unknown layer {canon!r}")
        arr = np.ascontiguousarray(external[ext_name], dtype=np.float32)
        if tuple(arr.shape) != expected[canon]:
            raise TransferError(
                f"{ext_name} -> {canon}: shape {tuple(arr.shape)} does not match required {expected[canon]}"
            )
        arrays[canon] = arr
    if not arrays:
        raise TransferError(f"{src}: name map matched no arrays in the source file")
    depth = max(int(k[4]) for k in arrays)
    meta_depth = depth if depth in (3, 4, 5) else (5 if depth > 5 else 3)
    meta = CheckpointMeta(
        pretrain_mode="classification",
        steps=0,
        source_dataset=source_dataset,
        pretrain_depth=meta_depth,
        seed=0,
    )
    return WeightBundle(arrays=arrays, meta=meta, config_echo={"source_file": str(src)})
