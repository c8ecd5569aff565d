"""Gradient verification: manual backprop against central finite differences,
Adam update properties, and the checker's own sensitivity."""

import numpy as np
import pytest

from risuav import nn
from risuav.numerics import RngStream


class TestDenseBackwardClosedForm:
    def test_quadratic_loss_gradient(self, rng):
        """Single dense layer, L = ||Wx + b - y||^2: dL/dW = 2 (Wx + b - y) x^T."""
        layer = nn.Dense(4, 3, rng)
        x = rng.normal(size=(1, 4))
        y = rng.normal(size=(1, 3))
        out = layer.forward(x)
        err = out - y
        layer.backward(2.0 * err)
        expected_gw = 2.0 * err.T @ x
        expected_gb = 2.0 * err[0]
        assert np.allclose(layer.gw, expected_gw, atol=1e-12)
        assert np.allclose(layer.gb, expected_gb, atol=1e-12)


class TestFiniteDifference:
    def test_three_layer_dense_net(self):
        rng = RngStream(41, 0)
        critic = nn.Critic(6, 3, hidden=(8, 8), conv=None, rng=rng)
        s = rng.normal(size=(4, 6))
        a = rng.normal(size=(4, 3))
        report = nn.check_critic_gradients(critic, s, a)
        assert report.passed, f"worst {report.worst}: {report.max_rel_err}"

    def test_conv_critic_all_params_and_action_input(self):
        rng = RngStream(42, 0)
        critic = nn.Critic(10, 4, hidden=(8, 8),
                           conv=nn.ConvSpec(channels=(3, 3), kernel=3, stride=1, padding=1),
                           rng=rng)
        s = rng.normal(size=(3, 10))
        a = rng.normal(size=(3, 4))
        report = nn.check_critic_gradients(critic, s, a)
        assert report.passed, f"worst {report.worst}: {report.max_rel_err}"

    def test_strided_conv_critic(self):
        rng = RngStream(43, 0)
        critic = nn.Critic(9, 2, hidden=(8,),
                           conv=nn.ConvSpec(channels=(2,), kernel=3, stride=2, padding=1),
                           rng=rng)
        s = rng.normal(size=(2, 9))
        a = rng.normal(size=(2, 2))
        report = nn.check_critic_gradients(critic, s, a)
        assert report.passed, f"worst {report.worst}: {report.max_rel_err}"

    def test_actor_gradients(self):
        rng = RngStream(44, 0)
        actor = nn.Actor(7, 4, hidden=(8, 8), rng=rng)
        s = rng.normal(size=(3, 7))
        report = nn.check_actor_gradients(actor, s, rng)
        assert report.passed, f"worst {report.worst}: {report.max_rel_err}"

    def test_detects_corrupted_gradient(self):
        """Doubling one analytic weight gradient must fail the check."""
        rng = RngStream(45, 0)
        critic = nn.Critic(5, 2, hidden=(6,), conv=None, rng=rng)
        s = rng.normal(size=(2, 5))
        a = rng.normal(size=(2, 2))
        critic.zero_grad()
        critic.forward(s, a)
        critic.backward(np.full(2, 0.5))
        analytic = [g.copy() for g in critic.grads()]
        analytic[0][0, 0] *= 2.0

        def f():
            return float(critic.forward(s, a).mean())

        report = nn.finite_diff_check(f, critic.params(), analytic)
        assert not report.passed

    def test_zero_input_still_passes(self):
        rng = RngStream(46, 0)
        critic = nn.Critic(5, 2, hidden=(6,), conv=nn.ConvSpec(channels=(2,)), rng=rng)
        s = np.zeros((2, 5))
        a = np.zeros((2, 2))
        report = nn.check_critic_gradients(critic, s, a)
        assert report.passed


class TestAdam:
    def test_first_step_is_signed_lr(self, rng):
        p = rng.normal(size=(4,))
        start = p.copy()
        g = rng.normal(size=(4,))
        opt = nn.Adam([p], lr=0.01)
        opt.step([g])
        # bias-corrected first step: -lr * g / (|g| + eps) ~ -lr * sign(g)
        assert np.allclose(p - start, -0.01 * np.sign(g), atol=1e-6)

    def test_zero_gradient_no_move(self, rng):
        p = rng.normal(size=(4,))
        start = p.copy()
        opt = nn.Adam([p], lr=0.01)
        opt.step([np.zeros(4)])
        assert np.array_equal(p, start)

    def test_inverse_time_decay_halves_rate(self):
        opt = nn.Adam([np.zeros(1)], lr=0.5, decay=1e-5)
        opt.t = 100000
        assert opt.effective_lr == pytest.approx(0.25)

    def test_decay_monotone(self):
        opt = nn.Adam([np.zeros(1)], lr=1.0, decay=1e-3)
        rates = []
        for _ in range(5):
            opt.step([np.ones(1)])
            rates.append(opt.effective_lr)
        assert all(a > b for a, b in zip(rates, rates[1:]))
