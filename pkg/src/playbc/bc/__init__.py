from playbc.bc.losses import ZERO_NORM_THRESHOLD, bc_loss, direction_cosines
from playbc.bc.train import (
    BCConfig,
    InitMode,
    TransitionSampler,
    initialize_policy,
    train_bc,
    validate_init_bundle,
)

__all__ = [
    "BCConfig",
    "InitMode",
    "TransitionSampler",
    "ZERO_NORM_THRESHOLD",
    "bc_loss",
    "direction_cosines",
    "initialize_policy",
    "train_bc",
    "validate_init_bundle",
]
