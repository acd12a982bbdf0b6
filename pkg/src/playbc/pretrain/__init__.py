from playbc.pretrain.batches import (
    FrameSampler,
    TemporalPairSampler,
    assemble_frame_batch,
    assemble_pair_batch,
)
from playbc.pretrain.byol import (
    PretrainConfig,
    TrainingLog,
    make_optimizer,
    pretrain_byol,
)
from playbc.pretrain.ema import ema_update, ema_update_module_, tau_for_step
from playbc.pretrain.losses import (
    byol_time_loss,
    kl_divergence,
    l2_normalize,
    reconstruction_loss,
)
from playbc.pretrain.recon import pretrain_autoencoder, pretrain_vae

__all__ = [
    "FrameSampler",
    "PretrainConfig",
    "TemporalPairSampler",
    "TrainingLog",
    "assemble_frame_batch",
    "assemble_pair_batch",
    "byol_time_loss",
    "ema_update",
    "ema_update_module_",
    "kl_divergence",
    "l2_normalize",
    "make_optimizer",
    "pretrain_autoencoder",
    "pretrain_byol",
    "pretrain_vae",
    "reconstruction_loss",
    "tau_for_step",
]
