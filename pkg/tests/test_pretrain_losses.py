import numpy as np
import pytest
import torch
import torch.nn.functional as F

from playbc.pretrain import (
    byol_time_loss,
    ema_update,
    ema_update_module_,
    kl_divergence,
    l2_normalize,
    reconstruction_loss,
    tau_for_step,
)


def e(i, dim=128):
    v = torch.zeros(1, dim)
    v[0, i] = 1.0
    return v


class TestByolTimeLoss:
    def test_identical_inputs_zero(self):
        q = torch.randn(4, 128)
        assert byol_time_loss(q, q.clone()).item() == 0.0

    def test_orthogonal_is_two(self):
        # normalized e1 vs e2: ||e1 - e2||^2 = 2 exactly
        assert byol_time_loss(e(0), e(1)).item() == pytest.approx(2.0, abs=1e-6)

    def test_antiparallel_is_four(self):
        assert byol_time_loss(e(0), -e(0)).item() == pytest.approx(4.0, abs=1e-6)

    def test_scale_invariance(self):
        q = torch.randn(4, 128)
        loss = byol_time_loss(3.0 * q, 0.5 * q)
        assert loss.item() == pytest.approx(0.0, abs=1e-6)

    def test_range_property(self):
        for seed in range(10):
            g = torch.Generator().manual_seed(seed)
            q = torch.randn(16, 128, generator=g)
            k = torch.randn(16, 128, generator=g)
            val = byol_time_loss(q, k).item()
            assert 0.0 <= val <= 4.0

    def test_batch_mean_oracle(self):
        # one aligned pair + one antiparallel pair -> (0 + 4) / 2 = 2
        q = torch.cat([e(0), e(1)])
        k = torch.cat([e(0), -e(1)])
        assert byol_time_loss(q, k).item() == pytest.approx(2.0, abs=1e-6)

    def test_gradient_reaches_query_only(self):
        q = torch.randn(4, 128, requires_grad=True)
        k = torch.randn(4, 128, requires_grad=True)
        byol_time_loss(q, k).backward()
        assert q.grad is not None and q.grad.abs().sum() > 0
        assert k.grad is None

    def test_unnormalized_oracle(self):
        q = e(0)
        k = torch.zeros(1, 128)
        assert byol_time_loss(q, k, normalize=False).item() == pytest.approx(1.0, abs=1e-7)

    def test_zero_vectors_no_nan(self):
        val = byol_time_loss(torch.zeros(2, 8), torch.ones(2, 8))
        assert torch.isfinite(val)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            byol_time_loss(torch.zeros(2, 8), torch.zeros(2, 9))

    def test_finite_difference_gradient(self):
        # numerical check of d loss / d query on a small problem
        torch.manual_seed(0)
        q64 = torch.randn(3, 8, dtype=torch.float64, requires_grad=True)
        k64 = torch.randn(3, 8, dtype=torch.float64)
        loss = byol_time_loss(q64, k64)
        loss.backward()
        h = 1e-6
        checked = 0
        for i in range(3):
            for j in range(8):
                qp = q64.detach().clone()
                qm = q64.detach().clone()
                qp[i, j] += h
                qm[i, j] -= h
                num = (byol_time_loss(qp, k64) - byol_time_loss(qm, k64)).item() / (2 * h)
                ana = q64.grad[i, j].item()
                assert num == pytest.approx(ana, abs=1e-6, rel=1e-5)
                checked += 1
        assert checked == 24


class TestL2Normalize:
    def test_unit_norm(self):
        x = torch.randn(5, 16) * 7
        n = l2_normalize(x).norm(dim=-1)
        assert torch.allclose(n, torch.ones(5), atol=1e-6)

    def test_zero_vector_stays_finite(self):
        out = l2_normalize(torch.zeros(1, 16))
        assert torch.isfinite(out).all()


class TestReconLosses:
    def test_mse_matches_torch(self):
        a, b = torch.randn(4, 3, 8, 8), torch.randn(4, 3, 8, 8)
        assert reconstruction_loss(a, b).item() == pytest.approx(F.mse_loss(a, b).item(), rel=1e-6)

    def test_mse_zero(self):
        a = torch.rand(2, 3, 4, 4)
        assert reconstruction_loss(a, a.clone()).item() == 0.0

    def test_kl_standard_normal_is_zero(self):
        mu = torch.zeros(4, 16)
        logvar = torch.zeros(4, 16)
        assert kl_divergence(mu, logvar).item() == 0.0

    def test_kl_unit_mean_scalar_is_half(self):
        # -0.5 * (1 + 0 - 1 - 1) = 0.5 for a single latent dim
        mu = torch.ones(1, 1)
        logvar = torch.zeros(1, 1)
        assert kl_divergence(mu, logvar).item() == pytest.approx(0.5, abs=1e-7)

    def test_kl_nonnegative_property(self):
        for seed in range(10):
            g = torch.Generator().manual_seed(seed)
            mu = torch.randn(8, 16, generator=g)
            logvar = torch.randn(8, 16, generator=g)
            assert kl_divergence(mu, logvar).item() >= 0.0

    def test_kl_sums_over_dims(self):
        # two independent unit-mean dims -> 2 * 0.5 = 1.0
        mu = torch.ones(1, 2)
        logvar = torch.zeros(1, 2)
        assert kl_divergence(mu, logvar).item() == pytest.approx(1.0, abs=1e-7)


class TestEma:
    def test_scalar_oracle(self):
        out = ema_update({"w": np.float64(2.0)}, {"w": np.float64(1.0)}, tau=0.99)
        expected = 0.99 * 2.0 + 0.01 * 1.0  # = 1.99 up to float64 rounding
        assert out["w"] == pytest.approx(expected, abs=1e-15)
        assert out["w"] == pytest.approx(1.99, abs=1e-12)

    def test_tau_one_freezes_target(self):
        t = {"w": np.arange(4.0)}
        o = {"w": np.ones(4)}
        np.testing.assert_array_equal(ema_update(t, o, 1.0)["w"], t["w"])

    def test_tau_zero_copies_online(self):
        t = {"w": np.arange(4.0)}
        o = {"w": np.ones(4)}
        np.testing.assert_array_equal(ema_update(t, o, 0.0)["w"], o["w"])

    def test_closed_form_constant_online(self):
        # n repeats against a fixed online: tau^n * t0 + (1 - tau^n) * o
        rng = np.random.default_rng(0)
        t0 = {"w": rng.normal(size=(5, 7))}
        o = {"w": rng.normal(size=(5, 7))}
        tau = 0.996
        cur = t0
        for n in range(1, 20):
            cur = ema_update(cur, o, tau)
            expected = tau**n * t0["w"] + (1 - tau**n) * o["w"]
            np.testing.assert_allclose(cur["w"], expected, atol=1e-12, rtol=0)

    def test_composition_property(self):
        rng = np.random.default_rng(1)
        t = {"w": rng.normal(size=16)}
        o = {"w": rng.normal(size=16)}
        for tau1, tau2 in [(0.9, 0.99), (0.5, 0.5), (0.996, 0.996), (1.0, 0.3)]:
            two_steps = ema_update(ema_update(t, o, tau1), o, tau2)
            one_step = ema_update(t, o, tau1 * tau2)
            np.testing.assert_allclose(two_steps["w"], one_step["w"], atol=1e-12, rtol=0)

    def test_dtype_preserved(self):
        out = ema_update({"w": np.zeros(3, np.float32)}, {"w": np.ones(3, np.float32)}, 0.5)
        assert out["w"].dtype == np.float32

    def test_key_mismatch(self):
        with pytest.raises(ValueError, match="key mismatch"):
            ema_update({"a": np.zeros(1)}, {"b": np.zeros(1)}, 0.5)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            ema_update({"a": np.zeros(2)}, {"a": np.zeros(3)}, 0.5)

    def test_bad_tau(self):
        with pytest.raises(ValueError):
            ema_update({"a": np.zeros(1)}, {"a": np.zeros(1)}, 1.5)

    def test_module_variant_matches_numpy(self):
        a = torch.nn.Linear(4, 3)
        b = torch.nn.Linear(4, 3)
        expected = ema_update(
            {k: v.numpy().copy() for k, v in a.state_dict().items()},
            {k: v.numpy().copy() for k, v in b.state_dict().items()},
            0.9,
        )
        ema_update_module_(a, b, 0.9)
        for k, v in a.state_dict().items():
            np.testing.assert_allclose(v.numpy(), expected[k], atol=1e-6, rtol=0)

    def test_module_variant_is_in_place(self):
        a = torch.nn.Linear(2, 2)
        b = torch.nn.Linear(2, 2)
        before = a.weight.detach().clone()
        ema_update_module_(a, b, 0.5)
        assert not torch.equal(a.weight, before)


class TestTauSchedule:
    def test_constant(self):
        assert tau_for_step(0.996, 17, 100, "constant") == 0.996

    def test_cosine_starts_at_base(self):
        assert tau_for_step(0.9, 0, 100, "cosine") == pytest.approx(0.9, abs=1e-12)

    def test_cosine_monotone_toward_one(self):
        vals = [tau_for_step(0.9, s, 50, "cosine") for s in range(50)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= 1.0
        assert vals[-1] > 0.999

    def test_unknown_schedule(self):
        with pytest.raises(ValueError):
            tau_for_step(0.9, 0, 10, "linear")
