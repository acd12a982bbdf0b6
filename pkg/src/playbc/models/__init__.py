from playbc.models.bundle import (
    CheckpointMeta,
    TransferSummary,
    WeightBundle,
    bundle_from_module,
    checkpoint_id,
    conv_layer_keys,
    load_checkpoint,
    load_into_module,
    module_arrays,
    save_checkpoint,
    transfer_pretrained_weights,
)
from playbc.models.configs import (
    CONV5_STACK,
    LATENT_DIM,
    AutoencoderConfig,
    ConvSpec,
    PlayEncoderConfig,
    PolicyConfig,
)
from playbc.models.convert import ALEXNET_NAME_MAP, convert_external_weights, load_name_map
from playbc.models.nets import (
    PlayEncoder,
    Policy,
    SpatialSoftmax,
    Reconstructor,
    build_play_encoder,
    build_policy,
    build_reconstructor,
    seeded_init_,
)

__all__ = [
    "ALEXNET_NAME_MAP",
    "CONV5_STACK",
    "LATENT_DIM",
    "AutoencoderConfig",
    "CheckpointMeta",
    "ConvSpec",
    "PlayEncoder",
    "PlayEncoderConfig",
    "Policy",
    "PolicyConfig",
    "Reconstructor",
    "SpatialSoftmax",
    "TransferSummary",
    "WeightBundle",
    "build_play_encoder",
    "build_policy",
    "build_reconstructor",
    "bundle_from_module",
    "checkpoint_id",
    "conv_layer_keys",
    "convert_external_weights",
    "load_checkpoint",
    "load_into_module",
    "load_name_map",
    "module_arrays",
    "save_checkpoint",
    "seeded_init_",
    "transfer_pretrained_weights",
]
