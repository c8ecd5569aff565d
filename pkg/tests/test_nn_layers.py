import numpy as np
import pytest

from risuav import nn
from risuav.numerics import RngStream


class TestConvOutputLen:
    def test_kernel_one_preserves_length(self):
        assert nn.conv_output_len(16, kernel=1, stride=1, padding=0) == 16

    def test_strided_padded(self):
        # (5 + 2 - 3) / 2 + 1 = 3
        assert nn.conv_output_len(5, kernel=3, stride=2, padding=1) == 3

    def test_rejects_non_integer(self):
        with pytest.raises(ValueError):
            nn.conv_output_len(6, kernel=3, stride=2, padding=1)   # (6+2-3)/2 not integer

    def test_rejects_kernel_larger_than_input(self):
        with pytest.raises(ValueError):
            nn.conv_output_len(3, kernel=5, stride=1, padding=0)

    def test_shape_law_random_sweep(self):
        """The built layer's output length follows the law for valid configs;
        invalid combinations are rejected at build time."""
        rng = RngStream(11, 0)
        checked = 0
        rejected = 0
        while checked < 1000:
            j = int(rng.integers(1, 64))
            k = int(rng.integers(1, 8))
            s = int(rng.integers(1, 5))
            p = int(rng.integers(0, 4))
            numer = j + 2 * p - k
            if numer >= 0 and numer % s == 0:
                layer = nn.Conv1d(1, 2, k, s, p, in_len=j, rng=rng)
                expected = numer // s + 1
                assert layer.out_len == expected
                x = rng.normal(size=(2, 1, j))
                assert layer.forward(x).shape == (2, 2, expected)
                checked += 1
            else:
                with pytest.raises(ValueError):
                    nn.Conv1d(1, 2, k, s, p, in_len=j, rng=rng)
                rejected += 1
        assert rejected > 0


class TestConvForward:
    def test_identity_kernel(self, rng):
        layer = nn.Conv1d(1, 1, kernel=1, stride=1, padding=0, in_len=9, rng=rng)
        layer.w[...] = 1.0
        layer.b[...] = 0.0
        x = rng.normal(size=(3, 1, 9))
        assert np.allclose(layer.forward(x), x)

    def test_matches_naive_convolution(self, rng):
        layer = nn.Conv1d(2, 3, kernel=3, stride=2, padding=1, in_len=7, rng=rng)
        x = rng.normal(size=(2, 2, 7))
        y = layer.forward(x)
        xp = np.pad(x, ((0, 0), (0, 0), (1, 1)))
        for b in range(2):
            for o in range(3):
                for pos in range(layer.out_len):
                    acc = layer.b[o]
                    for i in range(2):
                        for t in range(3):
                            acc += layer.w[o, i, t] * xp[b, i, pos * 2 + t]
                    assert y[b, o, pos] == pytest.approx(acc, rel=1e-12)

    def test_rejects_wrong_input_shape(self, rng):
        layer = nn.Conv1d(1, 1, 1, 1, 0, in_len=5, rng=rng)
        with pytest.raises(ValueError):
            layer.forward(rng.normal(size=(2, 1, 6)))


class TestDense:
    def test_identity(self, rng):
        layer = nn.Dense(4, 4, rng)
        layer.w[...] = np.eye(4)
        layer.b[...] = 0.0
        x = rng.normal(size=(3, 4))
        assert np.allclose(layer.forward(x), x)

    def test_zero_weights_give_bias(self, rng):
        layer = nn.Dense(4, 2, rng)
        layer.w[...] = 0.0
        layer.b[...] = [1.5, -2.5]
        y = layer.forward(rng.normal(size=(3, 4)))
        assert np.allclose(y, [[1.5, -2.5]] * 3)

    def test_matches_double_loop(self, rng):
        layer = nn.Dense(5, 3, rng)
        x = rng.normal(size=(2, 5))
        y = layer.forward(x)
        for b in range(2):
            for o in range(3):
                acc = layer.b[o]
                for i in range(5):
                    acc += layer.w[o, i] * x[b, i]
                assert y[b, o] == pytest.approx(acc, rel=1e-12)


class TestActivations:
    def test_tanh_strictly_inside_unit_interval(self, rng):
        y = nn.Tanh().forward(rng.normal(size=(100,), scale=3.0))
        assert np.all(y > -1.0) and np.all(y < 1.0)

    def test_relu_nonnegative(self, rng):
        y = nn.Relu().forward(rng.normal(size=(100,)))
        assert np.all(y >= 0.0)


class TestActor:
    def test_outputs_bounded(self):
        rng = RngStream(21, 0)
        actor = nn.Actor(12, 5, hidden=(16, 16), rng=rng)
        s = rng.normal(size=(1000, 12), scale=3.0)
        out = actor.forward(s)
        assert np.all(out > -1.0) and np.all(out < 1.0)

    def test_zero_weights_zero_output(self, rng):
        actor = nn.Actor(6, 3, hidden=(8,), rng=rng)
        for p in actor.params():
            p[...] = 0.0
        assert np.allclose(actor.forward(rng.normal(size=(2, 6))), 0.0)

    def test_deterministic(self, rng):
        actor = nn.Actor(6, 3, hidden=(8,), rng=rng)
        s = rng.normal(size=(4, 6))
        assert np.array_equal(actor.forward(s), actor.forward(s))


class TestCritic:
    def test_zero_final_layer_gives_bias(self, rng):
        critic = nn.Critic(6, 3, hidden=(8, 8), conv=None, rng=rng)
        critic.dense[-1].w[...] = 0.0
        critic.dense[-1].b[...] = 4.25
        q = critic.forward(rng.normal(size=(5, 6)), rng.normal(size=(5, 3)))
        assert np.allclose(q, 4.25)

    def test_identity_conv_reduces_to_plain(self):
        rng = RngStream(31, 0)
        sdim, adim = 7, 3
        plain = nn.Critic(sdim, adim, hidden=(8, 8), conv=None, rng=rng)
        conv = nn.Critic(sdim, adim, hidden=(8, 8),
                         conv=nn.ConvSpec(channels=(1,), kernel=1), rng=rng)
        conv.conv_layers[0].w[...] = 1.0
        conv.conv_layers[0].b[...] = 0.0
        for dst, src in zip(conv.dense, plain.dense):
            for pd, ps in zip(dst.params(), src.params()):
                pd[...] = ps
        s = np.abs(rng.normal(size=(4, sdim)))   # positive so the ReLU is transparent
        a = rng.normal(size=(4, adim))
        assert np.allclose(conv.forward(s, a), plain.forward(s, a))

    def test_deterministic(self, rng):
        critic = nn.Critic(6, 3, hidden=(8,), conv=nn.ConvSpec(channels=(4,)), rng=rng)
        s = rng.normal(size=(4, 6))
        a = rng.normal(size=(4, 3))
        assert np.array_equal(critic.forward(s, a), critic.forward(s, a))


class TestCheckpoint:
    def test_round_trip_exact(self, rng, tmp_path):
        actor = nn.Actor(6, 3, hidden=(8,), rng=rng)
        critic = nn.Critic(6, 3, hidden=(8,), conv=nn.ConvSpec(channels=(4,)), rng=rng)
        path = tmp_path / "ckpt.npz"
        nn.save_checkpoint(path, {"actor": actor, "critic": critic})

        rng2 = RngStream(999, 0)
        actor2 = nn.Actor(6, 3, hidden=(8,), rng=rng2)
        critic2 = nn.Critic(6, 3, hidden=(8,), conv=nn.ConvSpec(channels=(4,)), rng=rng2)
        nn.load_checkpoint(path, {"actor": actor2, "critic": critic2})
        for p, q in zip(actor.params() + critic.params(),
                        actor2.params() + critic2.params()):
            assert np.array_equal(p, q)

    def test_shape_mismatch_rejected(self, rng, tmp_path):
        actor = nn.Actor(6, 3, hidden=(8,), rng=rng)
        path = tmp_path / "ckpt.npz"
        nn.save_checkpoint(path, {"actor": actor})
        other = nn.Actor(6, 3, hidden=(9,), rng=rng)
        with pytest.raises(ValueError, match="shape"):
            nn.load_checkpoint(path, {"actor": other})
