"""Named weight bundles, the checkpoint file format, and weight transfer.

Canonical parameter names: conv1.weight ... conv5.bias for the trunk,
proj.0/proj.2 for the projection head, pred.0/pred.2 for the predictor,
head.* for the policy action head. Torch modules store the trunk under a
"trunk." prefix, which is stripped/re-added at the bundle boundary.

Checkpoint format (little-endian, version 1):

    magic   b"PBWB"
    u32     format version
    u64     metadata length, then that many bytes of UTF-8 JSON
            (checkpoint meta + config echo)
    u32     array count
    per array:
        u16  name length, name bytes (UTF-8)
        u16  dtype string length, dtype bytes (numpy str, e.g. "<f4")
        u8   ndim, then ndim * u64 shape
        raw row-major array bytes
    sha256  digest of everything above (32 bytes)

The trailing digest makes truncation and corruption explicit load errors;
save -> load reproduces every array bit-exactly.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import struct
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import torch

from playbc.errors import CheckpointError, TransferError

MAGIC = b"PBWB"
FORMAT_VERSION = 1

PRETRAIN_MODES = ("none", "byol_time", "ae", "vae", "classification", "bc")


@dataclass
class CheckpointMeta:
    pretrain_mode: str = "none"
    steps: int = 0
    source_dataset: str = ""
    pretrain_depth: int = 3
    seed: int = 0
    created: str = ""
    schema_version: int = 1
    init_from: str = "none"  # provenance of the initial weights (a pretrain mode or BC init mode)

    def __post_init__(self):
        if self.pretrain_mode not in PRETRAIN_MODES:
            raise ValueError(f"pretrain_mode must be one of {PRETRAIN_MODES}, got {self.pretrain_mode!r}")
        if self.pretrain_depth not in (3, 4, 5):
            raise ValueError(f"pretrain_depth must be 3, 4, or 5, got {self.pretrain_depth}")
        if not self.created:
            self.created = datetime.now(timezone.utc).isoformat()


@dataclass
class WeightBundle:
    """Named parameter arrays plus provenance metadata."""

    arrays: dict[str, np.ndarray]
    meta: CheckpointMeta = field(default_factory=CheckpointMeta)
    config_echo: dict = field(default_factory=dict)

    def keys(self) -> list[str]:
        return list(self.arrays.keys())

    def conv_keys(self) -> list[str]:
        return [k for k in self.arrays if k.startswith("conv")]


def _canonical(name: str) -> str:
    return name.removeprefix("trunk.")


def module_arrays(module: torch.nn.Module, prefixes: tuple[str, ...] | None = None) -> dict[str, np.ndarray]:
    """Extract canonical-named float arrays from a module's state dict."""
    out = {}
    for k, v in module.state_dict().items():
        name = _canonical(k)
        if prefixes is None or name.startswith(prefixes):
            out[name] = v.detach().cpu().numpy().copy()
    return out


def bundle_from_module(
    module: torch.nn.Module,
    meta: CheckpointMeta,
    prefixes: tuple[str, ...] | None = None,
    config_echo: dict | None = None,
) -> WeightBundle:
    return WeightBundle(
        arrays=module_arrays(module, prefixes),
        meta=meta,
        config_echo=config_echo or {},
    )


def conv_layer_keys(depth: int) -> list[str]:
    keys = []
    for i in range(1, depth + 1):
        keys += [f"conv{i}.weight", f"conv{i}.bias"]
    return keys


@dataclass
class TransferSummary:
    transferred: list[str]
    ignored: list[str]
    fresh: list[str]
    depth: int

    def __str__(self) -> str:
        return (
            f"transferred {len(self.transferred)} arrays (depth {self.depth}); "
            f"ignored bundle keys: {self.ignored or 'none'}; "
            f"fresh layers: {self.fresh or 'none'}"
        )


def transfer_pretrained_weights(
    bundle: WeightBundle,
    module: torch.nn.Module,
    depth: int,
    allow_missing: bool = False,
) -> TransferSummary:
    """Copy conv1..depth from the bundle into the module, bit-exactly.

    Layers above `depth` and any non-conv module parameters keep their
    current (fresh) values. Projection/predictor/head keys in the bundle are
    never loaded; they are reported in the summary. With allow_missing,
    absent conv layers are skipped instead of raising (partial external
    weight maps).
    """
    state = module.state_dict()
    wanted = conv_layer_keys(depth)
    transferred = []
    with torch.no_grad():
        for name in wanted:
            if name not in bundle.arrays:
                if allow_missing:
                    continue
                raise TransferError(f"bundle is missing layer key {name!r}")
            target_key = name if name in state else f"trunk.{name}"
            if target_key not in state:
                raise TransferError(f"module has no parameter for {name!r}")
            src = bundle.arrays[name]
            dst = state[target_key]
            if tuple(src.shape) != tuple(dst.shape):
                raise TransferError(
                    f"shape mismatch for {name!r}: bundle {tuple(src.shape)} vs module {tuple(dst.shape)}"
                )
            dst.copy_(torch.from_numpy(np.ascontiguousarray(src)))
            transferred.append(name)
    module.load_state_dict(state)
    ignored = [k for k in bundle.arrays if k not in transferred]
    fresh = sorted(
        {
            _canonical(k).split(".")[0]
            for k in state
            if _canonical(k) not in transferred
        }
    )
    return TransferSummary(transferred=transferred, ignored=ignored, fresh=fresh, depth=depth)


def _meta_to_json(bundle: WeightBundle) -> bytes:
    payload = {
        "meta": dataclasses.asdict(bundle.meta),
        "config_echo": bundle.config_echo,
    }
    return json.dumps(payload, sort_keys=True).encode("utf-8")


def save_checkpoint(bundle: WeightBundle, path: str | Path) -> str:
    """Write the bundle; returns the checkpoint id (file digest prefix)."""
    parts = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    meta_json = _meta_to_json(bundle)
    parts.append(struct.pack("<Q", len(meta_json)))
    parts.append(meta_json)
    parts.append(struct.pack("<I", len(bundle.arrays)))
    for name, arr in bundle.arrays.items():
        # ascontiguousarray promotes 0-dim arrays to 1-dim; keep the shape
        arr = np.ascontiguousarray(arr).reshape(np.shape(arr))
        name_b = name.encode("utf-8")
        dtype_b = arr.dtype.str.encode("ascii")
        parts.append(struct.pack("<H", len(name_b)))
        parts.append(name_b)
        parts.append(struct.pack("<H", len(dtype_b)))
        parts.append(dtype_b)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}Q", *arr.shape) if arr.ndim else b"")
        parts.append(arr.tobytes())
    body = b"".join(parts)
    digest = hashlib.sha256(body).digest()
    Path(path).write_bytes(body + digest)
    return digest.hex()[:12]


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CheckpointError("checkpoint truncated mid-record")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_checkpoint(path: str | Path) -> WeightBundle:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4 + 32:
        raise CheckpointError(f"{path}: file too short to be a checkpoint")
    body, digest = raw[:-32], raw[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError(f"{path}: checksum mismatch (file truncated or corrupted)")
    r = _Reader(body)
    if r.take(4) != MAGIC:
        raise CheckpointError(f"{path}: bad magic; not a weight-bundle checkpoint")
    (version,) = r.unpack("<I")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {version} unsupported (reader supports {FORMAT_VERSION})"
        )
    (meta_len,) = r.unpack("<Q")
    payload = json.loads(r.take(meta_len).decode("utf-8"))
    meta = CheckpointMeta(**payload["meta"])
    (n_arrays,) = r.unpack("<I")
    arrays: dict[str, np.ndarray] = {}
    for _ in range(n_arrays):
        (name_len,) = r.unpack("<H")
        name = r.take(name_len).decode("utf-8")
        (dtype_len,) = r.unpack("<H")
        dtype = np.dtype(r.take(dtype_len).decode("ascii"))
        (ndim,) = r.unpack("<B")
        shape = r.unpack(f"<{ndim}Q") if ndim else ()
        count = int(np.prod(shape)) if shape else 1
        arrays[name] = np.frombuffer(r.take(count * dtype.itemsize), dtype=dtype).reshape(shape).copy()
    return WeightBundle(arrays=arrays, meta=meta, config_echo=payload.get("config_echo", {}))


def checkpoint_id(path: str | Path) -> str:
    raw = Path(path).read_bytes()
    if len(raw) < 32:
        raise CheckpointError(f"{path}: file too short")
    return raw[-32:].hex()[:12]


def load_into_module(bundle: WeightBundle, module: torch.nn.Module, strict: bool = True) -> None:
    """Load every bundle array into the module (canonical-name aware)."""
    state = module.state_dict()
    with torch.no_grad():
        for name, arr in bundle.arrays.items():
            key = name if name in state else f"trunk.{name}"
            if key not in state:
                if strict:
                    raise TransferError(f"module has no parameter named {name!r}")
                continue
            if tuple(state[key].shape) != tuple(arr.shape):
                raise TransferError(
                    f"shape mismatch for {name!r}: bundle {tuple(arr.shape)} vs module {tuple(state[key].shape)}"
                )
            # ascontiguousarray promotes 0-dim arrays to 1-dim; reshape back
            src = torch.from_numpy(np.ascontiguousarray(arr)).reshape(tuple(arr.shape))
            state[key].copy_(src)
    module.load_state_dict(state)
