"""Seed derivation shared by the training loops.

Every training step gets its own derived seed; per-item augmentation keys
then embed that step seed, so the full randomness of a run is a pure
function of (run seed, step, item identity) and nothing else.
"""

from __future__ import annotations

import hashlib
import json


def derive_step_seed(run_seed: int, step: int, label: str = "step") -> int:
    """Stable 64-bit seed for one training step of one run."""
    material = json.dumps([run_seed, label, step], separators=(",", ":"))
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
