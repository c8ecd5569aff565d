"""STAR-RIS-UAV downlink environment.

Scenario: an M-antenna base station serves K single-antenna users on the
reflection side and K more on the transmission side of an energy-splitting
STAR-RIS carried by a UAV; the direct BS-user links are blocked, so every
signal passes BS -> RIS -> user.  This module owns the geometry, channel
generation, SINR / sum-rate evaluation, projection of raw agent outputs
onto the feasible set, the real-valued state encoding, and the episode
step dynamics.

Channel model: i.i.d. Rayleigh small-scale fading scaled by a log-distance
large-scale gain g0 * d^-alpha evaluated on 3-D distances (BS and UAV
heights are part of the geometry).  The fading realisation is drawn once
per episode; the large-scale gains are recomputed from the executed UAV
position every step, so moving the UAV changes the average channel power
while the fading stays fixed within the episode.

Power and path-loss calibration (g0 = -30 dB at 1 m, exponents 2.2 BS-RIS
and 2.8 RIS-user, noise -110 dBm) are artifact constants chosen so that
default-geometry sum rates land in a useful 1-20 bit/s/Hz range; they are
documented here, not physical claims.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import RngStream, sample_complex_gaussian, trace_gram

__all__ = [
    "SystemConfig",
    "ChannelSet",
    "PhaseProfile",
    "Action",
    "Observation",
    "PerUserRates",
    "StepResult",
    "action_dim",
    "state_dim",
    "reference_state_dim",
    "large_scale_gain",
    "link_gains",
    "draw_unit_fading",
    "apply_gains",
    "generate_channels",
    "corrupt_csi",
    "effective_channel",
    "sinr",
    "sum_rate",
    "project_action",
    "encode_raw",
    "check_feasible",
    "encode_state",
    "StarRisUavEnv",
]


@dataclass
class SystemConfig:
    """Static scenario description.

    Counts, power budget and noise are linear quantities (watts); geometry
    is in meters.  Defaults follow the reference layout: BS at [0, 0]
    (height 10 m), UAV starting at [40, 20] at 30 m altitude, all K
    reflect users co-located at [80, 0] and all K transmit users at
    [80, 80].
    """

    M: int = 4                     # BS antennas
    N: int = 16                    # STAR-RIS elements per face
    K: int = 4                     # users per side
    pt: float = 10.0               # max transmit power, linear W (10 dB)
    sigma2: float = 1e-14          # noise power, linear W (-110 dBm)
    bs_xy: tuple = (0.0, 0.0)
    bs_height: float = 10.0
    uav_height: float = 30.0
    uav_init: tuple = (40.0, 20.0)
    uav_bounds: tuple = (0.0, 100.0, 0.0, 100.0)   # x_min, x_max, y_min, y_max
    user_xy_reflect: np.ndarray = None             # (K, 2)
    user_xy_transmit: np.ndarray = None            # (K, 2)
    alpha_bs_ris: float = 2.2      # path-loss exponent on the BS-RIS link
    alpha_ris_user: float = 2.8    # path-loss exponent on the RIS-user links
    ref_gain: float = 1e-3         # large-scale gain at the 1 m reference distance

    def __post_init__(self):
        if self.M < 1 or self.N < 1 or self.K < 1:
            raise ValueError(f"M, N, K must be >= 1, got {self.M}, {self.N}, {self.K}")
        if self.pt <= 0:
            raise ValueError(f"pt must be positive, got {self.pt}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        x0, x1, y0, y1 = self.uav_bounds
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"uav_bounds must be well ordered, got {self.uav_bounds}")
        if self.user_xy_reflect is None:
            self.user_xy_reflect = np.tile([80.0, 0.0], (self.K, 1))
        if self.user_xy_transmit is None:
            self.user_xy_transmit = np.tile([80.0, 80.0], (self.K, 1))
        self.user_xy_reflect = np.asarray(self.user_xy_reflect, dtype=float).reshape(self.K, 2)
        self.user_xy_transmit = np.asarray(self.user_xy_transmit, dtype=float).reshape(self.K, 2)

    @property
    def w_scale(self) -> float:
        """Amplitude scale mapping raw beamformer entries onto watts.

        With entries in [-1, 1] the assembled power tr{WW^H} can reach
        2 * pt, so the power constraint stays reachable and occasionally
        active; a uniform random raw vector lands near (2/3) * pt.
        """
        return float(np.sqrt(self.pt / (2.0 * self.M * self.K)))


def action_dim(cfg: SystemConfig) -> int:
    """Length of the raw action vector consumed by :func:`project_action`.

    Canonical wire order:
      [ Re W (2MK) | Im W (2MK) | reflect-phase (cos, sin) pairs (2N)
        | transmit-phase pairs (2N) | beta_r (N) | uav x, y (2) ]
    """
    return 4 * cfg.M * cfg.K + 5 * cfg.N + 2


def state_dim(cfg: SystemConfig) -> int:
    """Length of the flat observation vector (this artifact's accounting).

    previous action (4MK + 3N + 2) + Tp (2K) + Rp parts (4K)
    + Re/Im H_BR (2NM) + Re/Im H_RU (2NK) + Re/Im H_TU (2NK).
    """
    m, n, k = cfg.M, cfg.N, cfg.K
    return (4 * m * k + 3 * n + 2) + 6 * k + 2 * n * m + 4 * n * k


def reference_state_dim(cfg: SystemConfig) -> int:
    """Reference state-dimension formula 3K + 2NM + 4NK + 2MK + 4N + 2.

    Kept for comparison reporting; it does not decompose into the state
    layout used here, so :func:`state_dim` is the ground truth for all
    array sizes.
    """
    m, n, k = cfg.M, cfg.N, cfg.K
    return 3 * k + 2 * n * m + 4 * n * k + 2 * m * k + 4 * n + 2


# ---------------------------------------------------------------------------
# geometry and channels
# ---------------------------------------------------------------------------

def _dist3(p_xy, p_h: float, q_xy, q_h: float) -> float:
    dx = p_xy[0] - q_xy[0]
    dy = p_xy[1] - q_xy[1]
    dz = p_h - q_h
    return float(np.sqrt(dx * dx + dy * dy + dz * dz))


def large_scale_gain(distance: float, cfg: SystemConfig, link: str = "bs_ris") -> float:
    """Log-distance gain g0 * d^-alpha; d is clamped to the 1 m reference."""
    alpha = {"bs_ris": cfg.alpha_bs_ris, "ris_user": cfg.alpha_ris_user}[link]
    d = max(float(distance), 1.0)
    return cfg.ref_gain * d ** (-alpha)


def link_gains(cfg: SystemConfig, uav_xy):
    """Per-link average channel powers at the given UAV position.

    Returns (g_br, g_ru[K], g_tu[K]) for BS->RIS and per-user RIS->user
    links, using 3-D distances with the configured heights (users at
    ground level).
    """
    g_br = large_scale_gain(_dist3(cfg.bs_xy, cfg.bs_height, uav_xy, cfg.uav_height), cfg)
    g_ru = np.array([
        large_scale_gain(_dist3(uav_xy, cfg.uav_height, u, 0.0), cfg, "ris_user")
        for u in cfg.user_xy_reflect
    ])
    g_tu = np.array([
        large_scale_gain(_dist3(uav_xy, cfg.uav_height, u, 0.0), cfg, "ris_user")
        for u in cfg.user_xy_transmit
    ])
    return g_br, g_ru, g_tu


@dataclass
class ChannelSet:
    """The three channel matrices of one scenario snapshot.

    h_br: (N, M) BS -> RIS;  h_ru / h_tu: (N, K) RIS -> reflect / transmit
    users, one column per user.
    """

    h_br: np.ndarray
    h_ru: np.ndarray
    h_tu: np.ndarray

    def copy(self) -> "ChannelSet":
        return ChannelSet(self.h_br.copy(), self.h_ru.copy(), self.h_tu.copy())


def draw_unit_fading(cfg: SystemConfig, rng: RngStream) -> ChannelSet:
    """Unit-variance CN(0, 1) small-scale fading for every link."""
    return ChannelSet(
        h_br=sample_complex_gaussian(rng, cfg.N, cfg.M, 1.0),
        h_ru=sample_complex_gaussian(rng, cfg.N, cfg.K, 1.0),
        h_tu=sample_complex_gaussian(rng, cfg.N, cfg.K, 1.0),
    )


def apply_gains(fading: ChannelSet, cfg: SystemConfig, uav_xy) -> ChannelSet:
    """Scale unit fading by the large-scale amplitudes at this UAV position."""
    g_br, g_ru, g_tu = link_gains(cfg, uav_xy)
    return ChannelSet(
        h_br=fading.h_br * np.sqrt(g_br),
        h_ru=fading.h_ru * np.sqrt(g_ru)[None, :],
        h_tu=fading.h_tu * np.sqrt(g_tu)[None, :],
    )


def generate_channels(cfg: SystemConfig, uav_xy, rng: RngStream) -> ChannelSet:
    """Draw a full Rayleigh channel snapshot at the given UAV position."""
    return apply_gains(draw_unit_fading(cfg, rng), cfg, uav_xy)


def _corrupt_matrix(h: np.ndarray, delta: float, rng: RngStream) -> np.ndarray:
    power = float(np.mean(np.abs(h) ** 2))
    if power == 0.0:
        return h.copy()
    err_var = delta * power / (1.0 - delta)
    return h + sample_complex_gaussian(rng, h.shape[0], h.shape[1], err_var)


def corrupt_csi(channels: ChannelSet, delta: float, rng: RngStream) -> ChannelSet:
    """Imperfect-CSI model: h_hat = h + dh with dh ~ CN(0, err_var) i.i.d.

    err_var = delta * s / (1 - delta) per matrix, where s is the realized
    mean entry power of that matrix, so the uncertainty statistic
    E|h_hat - h|^2 / E|h_hat|^2 matches ``delta`` in expectation.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must be in [0, 1), got {delta}")
    if delta == 0.0:
        return channels.copy()
    return ChannelSet(
        h_br=_corrupt_matrix(channels.h_br, delta, rng),
        h_ru=_corrupt_matrix(channels.h_ru, delta, rng),
        h_tu=_corrupt_matrix(channels.h_tu, delta, rng),
    )


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

@dataclass
class PhaseProfile:
    """Per-element phase angles and energy splits of the STAR-RIS.

    phase_r / phase_t in [0, 2pi); beta_r in [0, 1] with the transmit
    split defined as 1 - beta_r, so the two add to one exactly.
    """

    phase_r: np.ndarray
    phase_t: np.ndarray
    beta_r: np.ndarray

    @property
    def beta_t(self) -> np.ndarray:
        return 1.0 - self.beta_r

    def weights(self, side: str) -> np.ndarray:
        """Diagonal of the phase-shift matrix: sqrt(beta) * e^{j phi}."""
        if side == "reflect":
            return np.sqrt(self.beta_r) * np.exp(1j * self.phase_r)
        if side == "transmit":
            return np.sqrt(self.beta_t) * np.exp(1j * self.phase_t)
        raise ValueError(f"side must be 'reflect' or 'transmit', got {side!r}")


@dataclass
class Action:
    """One feasible joint decision.

    w: (M, 2K) beamformer; columns 0..K-1 serve reflect-side users,
    K..2K-1 serve transmit-side users, all under the common power budget.
    """

    w: np.ndarray
    phases: PhaseProfile
    uav_xy: np.ndarray


def _squash(x: np.ndarray) -> np.ndarray:
    # the projector assumes actor outputs in [-1, 1] and clamps anything outside
    return np.clip(x, -1.0, 1.0)


def project_action(raw: np.ndarray, cfg: SystemConfig) -> Action:
    """Map a raw real vector onto the feasible action set.

    Wire order is documented on :func:`action_dim`.  The beamformer is
    assembled as (Re + j Im) * w_scale and rescaled by sqrt(pt / tr{WW^H})
    only when the power budget is exceeded; phase angles come from
    atan2(sin, cos) of each raw pair, which keeps |e^{j phi}| = 1 by
    construction and avoids wrap-around seams at 0 / 2pi; energy splits
    and the UAV position are clamped to [-1, 1] and affinely mapped into
    their boxes.  The map is idempotent on already-feasible encodings.
    """
    raw = np.asarray(raw, dtype=float)
    m, n, k = cfg.M, cfg.N, cfg.K
    expected = action_dim(cfg)
    if raw.shape != (expected,):
        raise ValueError(f"raw action must have shape ({expected},), got {raw.shape}")
    mk2 = 2 * m * k
    w = (raw[:mk2] + 1j * raw[mk2 : 2 * mk2]).reshape(m, 2 * k) * cfg.w_scale
    power = trace_gram(w)
    if power > cfg.pt:
        w *= np.sqrt(cfg.pt / power)

    off = 2 * mk2
    pairs_r = raw[off : off + 2 * n].reshape(n, 2)
    pairs_t = raw[off + 2 * n : off + 4 * n].reshape(n, 2)
    phase_r = np.mod(np.arctan2(pairs_r[:, 1], pairs_r[:, 0]), 2.0 * np.pi)
    phase_t = np.mod(np.arctan2(pairs_t[:, 1], pairs_t[:, 0]), 2.0 * np.pi)
    beta_r = 0.5 * (_squash(raw[off + 4 * n : off + 5 * n]) + 1.0)

    x0, x1, y0, y1 = cfg.uav_bounds
    u = _squash(raw[off + 5 * n :])
    uav_xy = np.array([
        x0 + 0.5 * (u[0] + 1.0) * (x1 - x0),
        y0 + 0.5 * (u[1] + 1.0) * (y1 - y0),
    ])
    return Action(w=w, phases=PhaseProfile(phase_r, phase_t, beta_r), uav_xy=uav_xy)


def encode_raw(action: Action, cfg: SystemConfig) -> np.ndarray:
    """Inverse of :func:`project_action` for feasible actions.

    Useful for idempotence checks and for seeding the previous-action slot
    of the state from a structured action.
    """
    m, n, k = cfg.M, cfg.N, cfg.K
    w = action.w / cfg.w_scale
    x0, x1, y0, y1 = cfg.uav_bounds
    u = np.array([
        2.0 * (action.uav_xy[0] - x0) / (x1 - x0) - 1.0,
        2.0 * (action.uav_xy[1] - y0) / (y1 - y0) - 1.0,
    ])
    pairs_r = np.stack([np.cos(action.phases.phase_r), np.sin(action.phases.phase_r)], axis=1)
    pairs_t = np.stack([np.cos(action.phases.phase_t), np.sin(action.phases.phase_t)], axis=1)
    return np.concatenate([
        w.real.reshape(-1),
        w.imag.reshape(-1),
        pairs_r.reshape(-1),
        pairs_t.reshape(-1),
        2.0 * action.phases.beta_r - 1.0,
        u,
    ])


def check_feasible(action: Action, cfg: SystemConfig, tol: float = 1e-9):
    """Raise AssertionError unless the action satisfies every constraint."""
    assert trace_gram(action.w) <= cfg.pt + tol, "power budget exceeded"
    for phase in (action.phases.phase_r, action.phases.phase_t):
        assert np.all(np.abs(np.abs(np.exp(1j * phase)) - 1.0) <= 1e-12), \
            "unit-modulus violated"
    assert np.all(action.phases.beta_r >= 0.0) and np.all(action.phases.beta_r <= 1.0)
    assert np.all(action.phases.beta_r + action.phases.beta_t == 1.0)
    x0, x1, y0, y1 = cfg.uav_bounds
    assert x0 - tol <= action.uav_xy[0] <= x1 + tol, "uav x out of bounds"
    assert y0 - tol <= action.uav_xy[1] <= y1 + tol, "uav y out of bounds"


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

def effective_channel(h_side: np.ndarray, phases: PhaseProfile, side: str,
                      h_br: np.ndarray) -> np.ndarray:
    """Cascaded channel H_side^T Theta_side H_BR, shape (K, M)."""
    theta = phases.weights(side)
    return (h_side.T * theta[None, :]) @ h_br


def sinr(eff: np.ndarray, w_side: np.ndarray, k: int, sigma2: float) -> float:
    """SINR of user k: |eff_k w_k|^2 / (sum_{n != k} |eff_k w_n|^2 + sigma2)."""
    y = eff[k] @ w_side
    p = np.abs(y) ** 2
    return float(p[k] / (p.sum() - p[k] + sigma2))


@dataclass
class PerUserRates:
    reflect: np.ndarray
    transmit: np.ndarray

    @property
    def total(self) -> float:
        return float(self.reflect.sum() + self.transmit.sum())


def sum_rate(channels: ChannelSet, action: Action, sigma2: float):
    """System sum rate sum_k log2(1 + gamma) over both faces, in bit/s/Hz.

    Returns (rate, PerUserRates); beamformer columns 0..K-1 serve the
    reflect side, K..2K-1 the transmit side.
    """
    k = channels.h_ru.shape[1]
    w_r = action.w[:, :k]
    w_t = action.w[:, k:]
    eff_r = effective_channel(channels.h_ru, action.phases, "reflect", channels.h_br)
    eff_t = effective_channel(channels.h_tu, action.phases, "transmit", channels.h_br)
    rates_r = np.array([np.log2(1.0 + sinr(eff_r, w_r, i, sigma2)) for i in range(k)])
    rates_t = np.array([np.log2(1.0 + sinr(eff_t, w_t, i, sigma2)) for i in range(k)])
    per_user = PerUserRates(rates_r, rates_t)
    return per_user.total, per_user


# ---------------------------------------------------------------------------
# state encoding
# ---------------------------------------------------------------------------

@dataclass
class Observation:
    """Flat real state vector plus its structured form.

    ``flat`` layout (length == state_dim(cfg)):
      [ prev action: Re W / w_scale, Im W / w_scale, phi_r / 2pi,
        phi_t / 2pi, beta_r, uav in [-1, 1]            (4MK + 3N + 2)
      | Tp / pt per user                               (2K)
      | Rp parts / sigma2 per user                     (4K)
      | Re, Im of H_BR / sqrt(ref g_br)                (2NM)
      | Re, Im of H_RU / sqrt(ref g_ru)                (2NK)
      | Re, Im of H_TU / sqrt(ref g_tu)                (2NK) ]

    The structured fields (tp, rp_parts) are unnormalized physical values;
    the flat vector applies the documented fixed scale factors so every
    block is O(1) for the networks.  Reference gains are the link gains at
    the centre of the UAV box, so position-induced power changes remain
    visible in the flat state.
    """

    flat: np.ndarray
    prev_action: Action
    tp: np.ndarray          # (2K,)  ||w_k||^2 per user
    rp_parts: np.ndarray    # (2K, 2)  |Re P_k|^2, |Im P_k|^2
    channels: ChannelSet


def _reference_gains(cfg: SystemConfig):
    x0, x1, y0, y1 = cfg.uav_bounds
    centre = (0.5 * (x0 + x1), 0.5 * (y0 + y1))
    return link_gains(cfg, centre)


def encode_state(prev: Action, channels: ChannelSet, sigma2: float,
                 cfg: SystemConfig) -> Observation:
    """Build the observation from the previous action and a channel snapshot."""
    k = cfg.K
    w_r = prev.w[:, :k]
    w_t = prev.w[:, k:]
    tp = np.concatenate([
        np.sum(np.abs(w_r) ** 2, axis=0),
        np.sum(np.abs(w_t) ** 2, axis=0),
    ])
    eff_r = effective_channel(channels.h_ru, prev.phases, "reflect", channels.h_br)
    eff_t = effective_channel(channels.h_tu, prev.phases, "transmit", channels.h_br)
    p_w = np.concatenate([
        np.array([eff_r[i] @ w_r[:, i] for i in range(k)]),
        np.array([eff_t[i] @ w_t[:, i] for i in range(k)]),
    ])
    rp_parts = np.stack([p_w.real**2, p_w.imag**2], axis=1)

    g_br, g_ru, g_tu = _reference_gains(cfg)
    h_br = channels.h_br / np.sqrt(g_br)
    h_ru = channels.h_ru / np.sqrt(g_ru)[None, :]
    h_tu = channels.h_tu / np.sqrt(g_tu)[None, :]
    flat = np.concatenate([
        encode_prev_action(prev, cfg),
        tp / cfg.pt,
        rp_parts.reshape(-1) / sigma2,
        h_br.real.reshape(-1), h_br.imag.reshape(-1),
        h_ru.real.reshape(-1), h_ru.imag.reshape(-1),
        h_tu.real.reshape(-1), h_tu.imag.reshape(-1),
    ])
    return Observation(flat=flat, prev_action=prev, tp=tp, rp_parts=rp_parts,
                       channels=channels)


def encode_prev_action(action: Action, cfg: SystemConfig) -> np.ndarray:
    """The 4MK + 3N + 2 real encoding of an executed action for the state."""
    w = action.w / cfg.w_scale
    x0, x1, y0, y1 = cfg.uav_bounds
    u = np.array([
        2.0 * (action.uav_xy[0] - x0) / (x1 - x0) - 1.0,
        2.0 * (action.uav_xy[1] - y0) / (y1 - y0) - 1.0,
    ])
    two_pi = 2.0 * np.pi
    return np.concatenate([
        w.real.reshape(-1),
        w.imag.reshape(-1),
        action.phases.phase_r / two_pi,
        action.phases.phase_t / two_pi,
        action.phases.beta_r,
        u,
    ])


# ---------------------------------------------------------------------------
# episode dynamics
# ---------------------------------------------------------------------------

@dataclass
class StepResult:
    """Outcome of one environment step.

    ``reward`` is the sum rate actually delivered on the true channels and
    equals the total of ``rates``.  ``believed_reward`` is the sum rate the
    system computes from its own (possibly corrupted) channel estimate; it
    is what the learner optimizes and coincides with ``reward`` under
    perfect CSI.
    """

    obs: Observation
    reward: float
    rates: PerUserRates
    believed_reward: float


class StarRisUavEnv:
    """Episode dynamics of the downlink scenario.

    reset() draws a fresh small-scale fading realisation, places the UAV
    at its initial position, and seeds the previous-action slot with a
    random feasible action (Gaussian raw vector through the projector).
    step(raw) projects the raw vector, moves the UAV, evaluates the true
    sum rate as the reward, and returns the next observation.

    With csi_delta > 0 a fresh corrupted channel estimate is drawn every
    step (per-step channel estimation error).  The observation and the
    believed reward the learner trains on are computed from that estimate;
    the reported reward is always the rate actually delivered on the true
    channel, so imperfect CSI degrades the measured performance through
    the estimate-truth mismatch.

    Holds an RngStream, so instances are single-owner; use one env per
    training run.
    """

    def __init__(self, cfg: SystemConfig, rng: RngStream, csi_delta: float = 0.0,
                 debug_checks: bool = False):
        if not 0.0 <= csi_delta < 1.0:
            raise ValueError(f"csi_delta must be in [0, 1), got {csi_delta}")
        self.cfg = cfg
        # separate sub-streams so the fading sequence is identical across
        # runs that differ only in csi_delta (paired comparisons)
        self._fading_rng = rng.child(0)
        self._init_rng = rng.child(1)
        self._csi_rng = rng.child(2)
        self.csi_delta = csi_delta
        self.debug_checks = debug_checks
        self._fading = None
        self._prev = None
        self.channels = None   # true channels at the current UAV position

    def _estimate(self, channels: ChannelSet) -> ChannelSet:
        if self.csi_delta > 0.0:
            return corrupt_csi(channels, self.csi_delta, self._csi_rng)
        return channels

    def reset(self) -> Observation:
        """Start an episode: redraw the fading, keep the persistent state.

        The working point (beamformer, phases, UAV position) is initialized
        once, on the first reset, from a Gaussian raw vector pushed through
        the projector; later episodes inherit the last executed action, so
        only the channel realisation changes at an episode boundary.
        """
        cfg = self.cfg
        self._fading = draw_unit_fading(cfg, self._fading_rng)
        if self._prev is None:
            init_raw = self._init_rng.normal(size=action_dim(cfg))
            self._prev = project_action(init_raw, cfg)
            self._prev.uav_xy = np.array(cfg.uav_init, dtype=float)
        self.channels = apply_gains(self._fading, cfg, self._prev.uav_xy)
        estimate = self._estimate(self.channels)
        return encode_state(self._prev, estimate, cfg.sigma2, cfg)

    def step(self, raw_action: np.ndarray) -> StepResult:
        if self._fading is None:
            raise RuntimeError("call reset() before step()")
        cfg = self.cfg
        action = project_action(raw_action, cfg)
        if self.debug_checks:
            check_feasible(action, cfg)
        self.channels = apply_gains(self._fading, cfg, action.uav_xy)
        reward, rates = sum_rate(self.channels, action, cfg.sigma2)
        estimate = self._estimate(self.channels)
        if self.csi_delta > 0.0:
            believed, _ = sum_rate(estimate, action, cfg.sigma2)
        else:
            believed = reward
        self._prev = action
        obs = encode_state(self._prev, estimate, cfg.sigma2, cfg)
        return StepResult(obs=obs, reward=reward, rates=rates,
                          believed_reward=believed)
