"""Architecture configs for the pretraining encoder and the policy network."""

from __future__ import annotations

from dataclasses import dataclass, field

from playbc.errors import ConfigError

LATENT_DIM = 128


@dataclass(frozen=True)
class ConvSpec:
    out_channels: int
    kernel: int
    stride: int = 1
    padding: int = 0
    activation: str = "relu"
    pool: str | None = None  # "max3s2" applies 3x3/2 max-pool after the activation

    def __post_init__(self):
        if self.out_channels <= 0:
            raise ConfigError(f"out_channels must be positive, got {self.out_channels}")
        if self.kernel < 1:
            raise ConfigError(f"kernel must be >= 1, got {self.kernel}")
        if self.pool not in (None, "max3s2"):
            raise ConfigError(f"unknown pool tag {self.pool!r}")


# Five-layer stack shared by the encoder (prefix) and the policy (all five).
# conv1-3 follow the classic large-kernel geometry; conv4/5 extend it with
# 256-channel 3x3 layers.
CONV5_STACK: tuple[ConvSpec, ...] = (
    ConvSpec(64, 11, stride=4, padding=2, pool="max3s2"),
    ConvSpec(192, 5, stride=1, padding=2, pool="max3s2"),
    ConvSpec(384, 3, stride=1, padding=1),
    ConvSpec(256, 3, stride=1, padding=1),
    ConvSpec(256, 3, stride=1, padding=1),
)


@dataclass(frozen=True)
class PlayEncoderConfig:
    """Conv stack + global average pooling + MLP projection head.

    The default three-layer stack pools to a 384-vector v; the projection
    head maps it through a 384-unit hidden layer to the 128-d latent. An
    optional predictor MLP of the same hidden/output sizes sits on the
    online branch during self-supervised training.
    """

    conv_specs: tuple[ConvSpec, ...] = CONV5_STACK[:3]
    proj_hidden: int = 384
    proj_out: int = LATENT_DIM
    predictor: bool = True
    input_size: int = 224

    def __post_init__(self):
        if not self.conv_specs:
            raise ConfigError("conv_specs must be non-empty")
        if self.proj_out != LATENT_DIM:
            raise ConfigError(f"projection output dim must be {LATENT_DIM}, got {self.proj_out}")

    @property
    def depth(self) -> int:
        return len(self.conv_specs)

    @property
    def feature_dim(self) -> int:
        return self.conv_specs[-1].out_channels

    @classmethod
    def for_depth(cls, depth: int, input_size: int = 224, predictor: bool = True) -> "PlayEncoderConfig":
        if depth not in (3, 4, 5):
            raise ConfigError(f"encoder depth must be 3, 4, or 5, got {depth}")
        return cls(conv_specs=CONV5_STACK[:depth], input_size=input_size, predictor=predictor)


@dataclass(frozen=True)
class PolicyConfig:
    """Five-conv stack, spatial-softmax keypoints, two-layer action head.

    Flattening (rather than pooling) keeps spatial layout in the head's
    input: the regressed displacement depends on *where* things are, not
    just what is visible. Head width follows the fc-layer convention of the
    classification stacks this trunk mirrors, scaled down.
    """

    conv_specs: tuple[ConvSpec, ...] = CONV5_STACK
    action_dim: int = 3
    input_size: int = 224
    head_hidden: int = 512

    def __post_init__(self):
        if self.action_dim != 3:
            raise ConfigError(f"action head must output 3 values, got {self.action_dim}")
        if len(self.conv_specs) != 5:
            raise ConfigError(f"policy needs a 5-layer conv stack, got {len(self.conv_specs)}")
        if self.head_hidden < 1:
            raise ConfigError(f"head_hidden must be >= 1, got {self.head_hidden}")


@dataclass(frozen=True)
class AutoencoderConfig:
    """Encoder prefix + 128-d bottleneck + upsampling decoder (AE/VAE runs)."""

    conv_specs: tuple[ConvSpec, ...] = CONV5_STACK[:3]
    latent_dim: int = LATENT_DIM
    input_size: int = 64
    variational: bool = False
    decoder_min_channels: int = 16
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def depth(self) -> int:
        return len(self.conv_specs)
