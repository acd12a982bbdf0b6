"""Torch modules: play encoder, policy, and the AE/VAE reconstruction nets.

Conv layers are registered as conv1..conv5 on every network so a state-dict
key like "conv2.weight" means the same layer everywhere; weight transfer
between pretraining and policy models relies on this.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from playbc.models.configs import AutoencoderConfig, ConvSpec, PlayEncoderConfig, PolicyConfig


def seeded_init_(module: nn.Module, seed: int) -> None:
    """Kaiming-uniform weights, zero biases, reproducible for a fixed seed."""
    g = torch.Generator().manual_seed(seed)
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            nn.init.kaiming_uniform_(m.weight, nonlinearity="relu", generator=g)
            if m.bias is not None:
                nn.init.zeros_(m.bias)


def _check_input(x: torch.Tensor) -> None:
    if x.dim() != 4 or x.shape[1] != 3:
        raise ValueError(f"expected input of shape (B, 3, H, W), got {tuple(x.shape)}")


class ConvStack(nn.Module):
    """Shared conv trunk; owns the conv1..convN attribute naming."""

    def __init__(self, specs: tuple[ConvSpec, ...], in_channels: int = 3):
        super().__init__()
        self.specs = specs
        c = in_channels
        for i, spec in enumerate(specs, start=1):
            setattr(self, f"conv{i}", nn.Conv2d(c, spec.out_channels, spec.kernel, spec.stride, spec.padding))
            c = spec.out_channels
        self.out_channels = c

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for i, spec in enumerate(self.specs, start=1):
            x = getattr(self, f"conv{i}")(x)
            if spec.activation == "relu":
                x = F.relu(x)
            if spec.pool == "max3s2":
                x = F.max_pool2d(x, kernel_size=3, stride=2)
        return x


def _mlp(in_dim: int, hidden: int, out_dim: int) -> nn.Sequential:
    # BatchNorm in the hidden layer keeps the online branch from collapsing
    # onto a constant vector; without it the bootstrap objective degenerates
    # quickly on easy data.
    return nn.Sequential(
        nn.Linear(in_dim, hidden),
        nn.BatchNorm1d(hidden),
        nn.ReLU(),
        nn.Linear(hidden, out_dim),
    )


class PlayEncoder(nn.Module):
    """Conv trunk -> global average pool (v) -> projection head (x).

    Global pooling makes v's dimensionality independent of input spatial
    size, so the same encoder runs on 64x64 synthetic frames and 224x224
    real ones.
    """

    def __init__(self, cfg: PlayEncoderConfig):
        super().__init__()
        self.cfg = cfg
        self.trunk = ConvStack(cfg.conv_specs)
        self.proj = _mlp(self.trunk.out_channels, cfg.proj_hidden, cfg.proj_out)
        self.pred = _mlp(cfg.proj_out, cfg.proj_hidden, cfg.proj_out) if cfg.predictor else None

    @property
    def depth(self) -> int:
        return self.cfg.depth

    def features(self, x: torch.Tensor) -> torch.Tensor:
        _check_input(x)
        return self.trunk(x).mean(dim=(2, 3))

    def project(self, v: torch.Tensor) -> torch.Tensor:
        return self.proj(v)

    def predict(self, z: torch.Tensor) -> torch.Tensor:
        if self.pred is None:
            raise RuntimeError("encoder was built without a predictor head")
        return self.pred(z)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.project(self.features(x))


class SpatialSoftmax(nn.Module):
    """Per-channel expected image coordinates (B, C, H, W) -> (B, 2C).

    Each channel's spatial map is standardized (zero mean, unit variance over
    its own cells) before the softmax, so attention sharpness depends only on
    the shape of the map, never on the trunk's arbitrary activation scale:
    keypoints are exactly invariant to positive rescaling of the features,
    and bounded logits keep softmax gradients from vanishing. The attention
    expectation under an (x, y) grid in [-1, 1] yields one keypoint per
    channel.
    """

    EPS = 1e-6
    TEMPERATURE = 1.0

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, c, h, w = x.shape
        z = x.flatten(2)  # (B, C, HW)
        z = (z - z.mean(dim=-1, keepdim=True)) / (z.std(dim=-1, keepdim=True, unbiased=False) + self.EPS)
        attn = (z / self.TEMPERATURE).softmax(dim=-1)
        ys = torch.linspace(-1.0, 1.0, h, dtype=x.dtype, device=x.device)
        xs = torch.linspace(-1.0, 1.0, w, dtype=x.dtype, device=x.device)
        grid_y, grid_x = torch.meshgrid(ys, xs, indexing="ij")
        ex = attn @ grid_x.reshape(-1)  # (B, C)
        ey = attn @ grid_y.reshape(-1)
        return torch.cat([ex, ey], dim=1)


class Policy(nn.Module):
    """Five-conv trunk -> spatial-softmax keypoints -> two-layer action head.

    Keypoints (expected per-channel image coordinates) keep the spatial
    information an action regressor needs while staying compact, so the
    head generalizes from few demonstrations instead of memorizing the
    flattened conv map. Inputs are resized to cfg.input_size.
    """

    def __init__(self, cfg: PolicyConfig):
        super().__init__()
        self.cfg = cfg
        self.trunk = ConvStack(cfg.conv_specs)
        self.keypoints = SpatialSoftmax()
        self.feature_dim = 2 * cfg.conv_specs[-1].out_channels
        self.head = nn.Sequential(
            nn.Linear(self.feature_dim, cfg.head_hidden),
            nn.ReLU(),
            nn.Linear(cfg.head_hidden, cfg.action_dim),
        )

    def features(self, x: torch.Tensor) -> torch.Tensor:
        _check_input(x)
        return self.keypoints(self.trunk(x))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x))


class Reconstructor(nn.Module):
    """Encoder prefix + bottleneck + upsampling decoder for AE/VAE baselines.

    The decoder mirrors the trunk's channel progression with stride-2
    transposed convs and interpolates to the exact input size at the end
    (the trunk's stride chain is not a power of two, so an exact transposed
    mirror does not exist).
    """

    def __init__(self, cfg: AutoencoderConfig):
        super().__init__()
        self.cfg = cfg
        self.trunk = ConvStack(cfg.conv_specs)
        with torch.no_grad():
            probe = self.trunk(torch.zeros(1, 3, cfg.input_size, cfg.input_size))
        self.feat_shape = tuple(probe.shape[1:])  # (C, h0, w0)
        c, h0, w0 = self.feat_shape
        if cfg.variational:
            self.fc_mu = nn.Linear(c, cfg.latent_dim)
            self.fc_logvar = nn.Linear(c, cfg.latent_dim)
        else:
            self.fc_latent = nn.Linear(c, cfg.latent_dim)
        self.fc_up = nn.Linear(cfg.latent_dim, c * h0 * w0)

        layers: list[nn.Module] = []
        size, ch = h0, c
        while size < cfg.input_size:
            nxt = max(cfg.decoder_min_channels, ch // 2)
            layers += [nn.ConvTranspose2d(ch, nxt, kernel_size=4, stride=2, padding=1), nn.ReLU()]
            ch, size = nxt, size * 2
        layers.append(nn.Conv2d(ch, 3, kernel_size=3, padding=1))
        self.decoder = nn.Sequential(*layers)

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        _check_input(x)
        return self.trunk(x).mean(dim=(2, 3))

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        c, h0, w0 = self.feat_shape
        y = self.fc_up(z).view(-1, c, h0, w0)
        y = torch.sigmoid(self.decoder(y))
        if y.shape[-1] != self.cfg.input_size:
            y = F.interpolate(y, size=(self.cfg.input_size, self.cfg.input_size), mode="bilinear", align_corners=False)
        return y

    def forward(self, x: torch.Tensor):
        v = self.encode(x)
        if self.cfg.variational:
            mu, logvar = self.fc_mu(v), self.fc_logvar(v)
            return mu, logvar
        return self.fc_latent(v)


def build_play_encoder(cfg: PlayEncoderConfig, seed: int = 0) -> PlayEncoder:
    enc = PlayEncoder(cfg)
    seeded_init_(enc, seed)
    return enc


def build_policy(cfg: PolicyConfig, seed: int = 0) -> Policy:
    policy = Policy(cfg)
    seeded_init_(policy, seed)
    return policy


def build_reconstructor(cfg: AutoencoderConfig, seed: int = 0) -> Reconstructor:
    net = Reconstructor(cfg)
    seeded_init_(net, seed)
    return net
