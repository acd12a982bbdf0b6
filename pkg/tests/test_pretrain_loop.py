import numpy as np
import pytest
import torch

from playbc.datasets import AugmentConfig
from playbc.errors import ConfigError
from playbc.models import CheckpointMeta, WeightBundle, conv_layer_keys, module_arrays
from playbc.pretrain import (
    FrameSampler,
    PretrainConfig,
    TemporalPairSampler,
    assemble_pair_batch,
    pretrain_autoencoder,
    pretrain_byol,
    pretrain_vae,
)
from playbc.seeding import derive_step_seed

from conftest import make_play_dataset


def tiny_cfg(**kw):
    defaults = dict(steps=3, batch_size=4, offset=3, lr=1e-3, depth=3, seed=0, input_size=64, log_every=0)
    defaults.update(kw)
    return PretrainConfig(**defaults)


@pytest.fixture(scope="module")
def play_ds():
    return make_play_dataset([8, 8], size=64)


class TestConfig:
    def test_validation(self):
        for bad in (
            dict(steps=0),
            dict(batch_size=0),
            dict(offset=0),
            dict(lr=0.0),
            dict(optimizer="rmsprop"),
            dict(tau=1.5),
            dict(tau_schedule="linear"),
            dict(depth=2),
            dict(beta=-1.0),
        ):
            with pytest.raises(ConfigError):
                tiny_cfg(**bad)

    def test_augment_size_synced_to_input(self):
        cfg = tiny_cfg(input_size=96, augment=AugmentConfig(output_size=224))
        assert cfg.augment.output_size == 96

    def test_to_dict_roundtrips_augment(self):
        d = tiny_cfg().to_dict()
        assert d["augment"]["output_size"] == 64
        assert d["tau"] == 0.996


class TestSamplers:
    def test_pair_pool_size(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        assert len(sampler) == (8 - 3) * 2

    def test_pair_offsets(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        rng = np.random.default_rng(0)
        for traj, t, u in sampler.sample(rng, 50):
            assert u - t == 3
            assert 0 <= t and u < traj.n_frames

    def test_pair_sampling_deterministic(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        a = [(tr.id, t, u) for tr, t, u in sampler.sample(np.random.default_rng(5), 20)]
        b = [(tr.id, t, u) for tr, t, u in sampler.sample(np.random.default_rng(5), 20)]
        assert a == b

    def test_no_pairs_raises(self):
        short = make_play_dataset([3, 2], size=64)
        with pytest.raises(ConfigError, match="no temporal pairs"):
            TemporalPairSampler(short, offset=5)

    def test_frame_pool_size(self, play_ds):
        assert len(FrameSampler(play_ds)) == 16


class TestBatchAssembly:
    def test_shapes_and_range(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        pairs = sampler.sample(np.random.default_rng(0), 4)
        xq, xk = assemble_pair_batch(pairs, AugmentConfig(output_size=32), step_seed=9)
        for x in (xq, xk):
            assert x.shape == (4, 3, 32, 32)
            assert x.dtype == torch.float32
            assert x.min() >= 0.0 and x.max() <= 1.0
        assert not torch.equal(xq, xk)

    def test_worker_count_invariance(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        pairs = sampler.sample(np.random.default_rng(1), 6)
        aug = AugmentConfig(output_size=32)
        q0, k0 = assemble_pair_batch(pairs, aug, step_seed=4, workers=0)
        q4, k4 = assemble_pair_batch(pairs, aug, step_seed=4, workers=4)
        assert torch.equal(q0, q4)
        assert torch.equal(k0, k4)

    def test_step_seed_changes_batch(self, play_ds):
        sampler = TemporalPairSampler(play_ds, offset=3)
        pairs = sampler.sample(np.random.default_rng(1), 4)
        aug = AugmentConfig(output_size=32)
        q1, _ = assemble_pair_batch(pairs, aug, step_seed=1)
        q2, _ = assemble_pair_batch(pairs, aug, step_seed=2)
        assert not torch.equal(q1, q2)


class TestDeriveStepSeed:
    def test_stable(self):
        assert derive_step_seed(3, 7) == derive_step_seed(3, 7)

    def test_distinct(self):
        seeds = {derive_step_seed(s, t) for s in range(4) for t in range(4)}
        seeds |= {derive_step_seed(0, 0, label="vae-eps")}
        assert len(seeds) == 17


class TestPretrainByol:
    def test_smoke_and_log(self, play_ds):
        bundle, tlog = pretrain_byol(play_ds, tiny_cfg())
        assert tlog.n_steps == 3
        for loss in tlog.losses:
            assert np.isfinite(loss)
            assert 0.0 <= loss <= 4.0
        assert set(bundle.arrays) >= set(conv_layer_keys(3))
        assert any(k.startswith("proj.") for k in bundle.arrays)
        assert any(k.startswith("pred.") for k in bundle.arrays)
        assert not any(k.startswith("conv4") for k in bundle.arrays)
        assert bundle.meta.pretrain_mode == "byol_time"
        assert bundle.meta.steps == 3
        assert bundle.meta.pretrain_depth == 3
        assert bundle.meta.source_dataset == play_ds.manifest.dataset_id
        assert bundle.meta.init_from == "none"

    def test_rerun_determinism(self, play_ds):
        _, log_a = pretrain_byol(play_ds, tiny_cfg())
        _, log_b = pretrain_byol(play_ds, tiny_cfg())
        assert log_a.losses == log_b.losses

    def test_worker_count_invariance(self, play_ds):
        _, log_a = pretrain_byol(play_ds, tiny_cfg(workers=0))
        _, log_b = pretrain_byol(play_ds, tiny_cfg(workers=3))
        assert log_a.losses == log_b.losses

    def test_seed_changes_losses(self, play_ds):
        _, log_a = pretrain_byol(play_ds, tiny_cfg(seed=0))
        _, log_b = pretrain_byol(play_ds, tiny_cfg(seed=1))
        assert log_a.losses != log_b.losses

    def test_target_follows_exact_ema(self, play_ds):
        # target parameters must equal the EMA recurrence applied to the
        # post-step online parameters, bit for bit, and never carry grads
        tau = 0.9
        snaps = []

        def hook(step, online, target):
            assert all(p.grad is None for p in target.parameters())
            assert all(not p.requires_grad for p in target.parameters())
            snaps.append((
                {k: v.detach().clone() for k, v in online.state_dict().items()},
                {k: v.detach().clone() for k, v in target.state_dict().items()},
            ))

        pretrain_byol(play_ds, tiny_cfg(tau=tau), on_step=hook)
        assert len(snaps) == 3
        for prev, cur in zip(snaps, snaps[1:]):
            _, prev_target = prev
            cur_online, cur_target = cur
            for k in cur_target:
                if cur_target[k].is_floating_point():
                    expected = prev_target[k].clone().mul_(tau).add_(cur_online[k], alpha=1.0 - tau)
                else:  # batch-norm step counters are copied, not averaged
                    expected = cur_online[k]
                assert torch.equal(cur_target[k], expected), k

    def test_online_and_target_diverge(self, play_ds):
        snaps = []
        pretrain_byol(
            play_ds,
            tiny_cfg(),
            on_step=lambda s, o, t: snaps.append(
                (module_arrays(o, ("conv1",)), module_arrays(t, ("conv1",)))
            ),
        )
        online, target = snaps[-1]
        assert not np.array_equal(online["conv1.weight"], target["conv1.weight"])

    def test_init_bundle_recorded(self, play_ds):
        rng = np.random.default_rng(0)
        arrays = {}
        shapes = {"conv1": (64, 3, 11, 11), "conv2": (192, 64, 5, 5), "conv3": (384, 192, 3, 3)}
        for name, shape in shapes.items():
            arrays[f"{name}.weight"] = rng.normal(scale=0.01, size=shape).astype(np.float32)
            arrays[f"{name}.bias"] = np.zeros(shape[0], dtype=np.float32)
        init = WeightBundle(arrays=arrays, meta=CheckpointMeta(pretrain_mode="classification"))

        captured = {}

        def hook(step, online, target):
            if step == 0 and not captured:
                captured.update(module_arrays(online, ("conv3",)))

        bundle, _ = pretrain_byol(play_ds, tiny_cfg(steps=1), init_bundle=init, on_step=hook)
        assert bundle.meta.init_from == "classification"
        # conv3 is frozen by neither loss nor EMA within one tiny step to
        # the point of erasing the init; check it moved from the init values
        # but stayed near them (optimizer step is small)
        assert not np.array_equal(captured["conv3.weight"], arrays["conv3.weight"])
        assert np.abs(captured["conv3.weight"] - arrays["conv3.weight"]).max() < 0.1

    def test_without_predictor(self, play_ds):
        bundle, tlog = pretrain_byol(play_ds, tiny_cfg(steps=2, use_predictor=False))
        assert not any(k.startswith("pred.") for k in bundle.arrays)
        assert all(np.isfinite(l) for l in tlog.losses)

    def test_symmetrized(self, play_ds):
        _, tlog = pretrain_byol(play_ds, tiny_cfg(steps=2, symmetrize=True))
        assert all(0.0 <= l <= 4.0 for l in tlog.losses)

    def test_save_checkpoint(self, play_ds, tmp_path):
        from playbc.models import load_checkpoint

        out = tmp_path / "pre.ckpt"
        bundle, _ = pretrain_byol(play_ds, tiny_cfg(steps=1), out_path=out)
        loaded = load_checkpoint(out)
        assert set(loaded.arrays) == set(bundle.arrays)
        assert loaded.config_echo["steps"] == 1


class TestTrainingLog:
    def test_csv_roundtrip(self, tmp_path, play_ds):
        _, tlog = pretrain_byol(play_ds, tiny_cfg(steps=2))
        path = tlog.to_csv(tmp_path / "log.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "step,loss,seconds"
        assert len(lines) == 3
        step, loss, seconds = lines[1].split(",")
        assert int(step) == 0
        assert float(loss) == pytest.approx(tlog.losses[0], rel=1e-9)
        assert float(seconds) >= 0.0


class TestReconPretrain:
    def test_ae_smoke(self, play_ds):
        bundle, tlog = pretrain_autoencoder(play_ds, tiny_cfg(steps=2, input_size=32))
        assert set(bundle.arrays) == set(conv_layer_keys(3))
        assert bundle.meta.pretrain_mode == "ae"
        assert all(np.isfinite(l) and l >= 0 for l in tlog.losses)

    def test_vae_smoke(self, play_ds):
        bundle, tlog = pretrain_vae(play_ds, tiny_cfg(steps=2, input_size=32, beta=0.5))
        assert bundle.meta.pretrain_mode == "vae"
        assert all(np.isfinite(l) and l >= 0 for l in tlog.losses)

    def test_vae_deterministic(self, play_ds):
        _, a = pretrain_vae(play_ds, tiny_cfg(steps=2, input_size=32))
        _, b = pretrain_vae(play_ds, tiny_cfg(steps=2, input_size=32))
        assert a.losses == b.losses

    def test_ae_loss_decreases_on_flat_frames(self):
        # constant-color frames are easy to reconstruct: the loss trend over
        # a short run must point down
        rng = np.random.default_rng(0)
        colors = rng.integers(0, 256, size=(2, 10, 1, 1, 3), dtype=np.uint8)
        frames = np.broadcast_to(colors, (2, 10, 32, 32, 3))
        from playbc.datasets import ArrayFrames, DatasetManifest, ManifestEntry, PlayDataset, Trajectory

        trajs = [Trajectory(id=f"t{i}", frames=ArrayFrames(np.ascontiguousarray(frames[i]))) for i in range(2)]
        ds = PlayDataset(
            trajectories=trajs,
            manifest=DatasetManifest(
                dataset_id="flat",
                trajectories=tuple(ManifestEntry(id=t.id, n_frames=10, checksum="") for t in trajs),
            ),
        )
        _, tlog = pretrain_autoencoder(ds, tiny_cfg(steps=30, batch_size=8, input_size=32, lr=3e-3))
        first = float(np.median(tlog.losses[:5]))
        last = float(np.median(tlog.losses[-5:]))
        assert last < first
