import numpy as np
import pytest

from risuav.env import (SystemConfig, action_dim, check_feasible, encode_raw,
                        project_action)
from risuav.numerics import RngStream, trace_gram


class TestProjectAction:
    def test_over_budget_rescaled(self):
        """Raw giving tr{WW^H} = 4 with pt = 1 is scaled down to the budget."""
        cfg = SystemConfig(M=1, N=1, K=1, pt=1.0)
        raw = np.zeros(action_dim(cfg))
        # two complex entries; w_scale = sqrt(pt / (2MK)) = sqrt(1/2)
        # choose re parts so that |w|^2 sums to 4 before rescale
        raw[0] = np.sqrt(2.0) / cfg.w_scale * 1.0   # -> w00 = sqrt(2)
        raw[1] = np.sqrt(2.0) / cfg.w_scale * 1.0   # -> w01 = sqrt(2)
        action = project_action(raw, cfg)
        assert trace_gram(action.w) == pytest.approx(1.0, rel=1e-12)
        # direction preserved: equal magnitudes
        assert abs(action.w[0, 0]) == pytest.approx(abs(action.w[0, 1]))

    def test_under_budget_untouched(self):
        cfg = SystemConfig(M=1, N=1, K=1, pt=1.0)
        raw = np.zeros(action_dim(cfg))
        raw[0] = 0.5 / cfg.w_scale           # |w|^2 = 0.25
        raw[1] = 0.5 / cfg.w_scale           # |w|^2 = 0.25 -> total 0.5 < 1
        action = project_action(raw, cfg)
        assert trace_gram(action.w) == pytest.approx(0.5, rel=1e-12)
        assert action.w[0, 0] == pytest.approx(0.5)

    def test_feasibility_sweep(self):
        """Random raw vectors (both within and far outside [-1, 1]) always
        project onto the feasible set."""
        rng = RngStream(13, 0)
        cfg = SystemConfig(M=2, N=4, K=2, pt=2.0)
        adim = action_dim(cfg)
        for i in range(2000):
            scale = 4.0 if i % 3 == 0 else 1.0
            action = project_action(rng.uniform(-scale, scale, adim), cfg)
            check_feasible(action, cfg)

    def test_wrong_length_rejected(self):
        cfg = SystemConfig(M=2, N=4, K=2)
        with pytest.raises(ValueError, match="shape"):
            project_action(np.zeros(action_dim(cfg) + 1), cfg)

    def test_phase_from_pair(self):
        cfg = SystemConfig(M=1, N=2, K=1)
        raw = np.zeros(action_dim(cfg))
        off = 4  # past the 4MK beamformer block
        raw[off + 0], raw[off + 1] = 0.0, 1.0    # element 0: angle pi/2
        raw[off + 2], raw[off + 3] = -1.0, 0.0   # element 1: angle pi
        action = project_action(raw, cfg)
        assert action.phases.phase_r[0] == pytest.approx(np.pi / 2)
        assert action.phases.phase_r[1] == pytest.approx(np.pi)

    def test_beta_and_uav_affine_maps(self):
        cfg = SystemConfig(M=1, N=1, K=1, uav_bounds=(0.0, 100.0, -50.0, 50.0))
        adim = action_dim(cfg)
        raw = np.zeros(adim)
        raw[-3] = 1.0        # beta_r raw at upper clamp -> 1.0
        raw[-2] = -1.0       # x at lower bound
        raw[-1] = 0.5        # y at 3/4 of the range
        action = project_action(raw, cfg)
        assert action.phases.beta_r[0] == pytest.approx(1.0)
        assert action.uav_xy[0] == pytest.approx(0.0)
        assert action.uav_xy[1] == pytest.approx(25.0)

    def test_clamps_out_of_range_squash_inputs(self):
        cfg = SystemConfig(M=1, N=1, K=1)
        raw = np.zeros(action_dim(cfg))
        raw[-3] = 7.0
        raw[-2] = -9.0
        raw[-1] = 9.0
        action = project_action(raw, cfg)
        assert action.phases.beta_r[0] == 1.0
        assert action.uav_xy[0] == cfg.uav_bounds[0]
        assert action.uav_xy[1] == cfg.uav_bounds[3]

    def test_idempotent_on_feasible_encodings(self):
        """Re-encoding and re-projecting a projected action changes nothing."""
        rng = RngStream(14, 0)
        cfg = SystemConfig(M=2, N=3, K=2)
        for _ in range(100):
            action = project_action(rng.uniform(-1, 1, action_dim(cfg)), cfg)
            again = project_action(encode_raw(action, cfg), cfg)
            assert np.allclose(again.w, action.w, atol=1e-12)
            assert np.allclose(again.phases.phase_r, action.phases.phase_r, atol=1e-12)
            assert np.allclose(again.phases.phase_t, action.phases.phase_t, atol=1e-12)
            assert np.allclose(again.phases.beta_r, action.phases.beta_r, atol=1e-12)
            assert np.allclose(again.uav_xy, action.uav_xy, atol=1e-12)

    def test_action_dim_formula(self):
        cfg = SystemConfig(M=3, N=5, K=2)
        assert action_dim(cfg) == 4 * 3 * 2 + 5 * 5 + 2
        raw = np.zeros(action_dim(cfg))
        project_action(raw, cfg)   # consumes exactly the advertised length
