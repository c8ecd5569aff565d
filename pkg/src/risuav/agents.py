"""Replay buffer, exploration schedule and the three learners.

* ddpg    -- actor-critic with a dense critic and no action perturbation;
             the stochastic perturbation factor is the ca-ddpg addition, so
             the plain baseline runs without one.
* ca-ddpg -- convolution-augmented critic plus a decaying Gaussian
             perturbation of the actor output.
* td3     -- twin dense critics with min-target, delayed actor updates and
             smoothed target actions.

Training follows the standard off-policy loop: act, perturb, step the
environment, store the transition, and once warm, sample a minibatch,
regress the critic on bootstrapped targets, ascend the actor along the
critic's action gradient, and softly update the targets.  Transitions
store the raw (pre-projection) action so actor gradients act in the
actor's own output space; the projected action determines the reward.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import nn
from .env import StarRisUavEnv, action_dim, state_dim
from .numerics import RngStream

__all__ = [
    "AgentConfig",
    "Transition",
    "ReplayBuffer",
    "NoiseSchedule",
    "explore",
    "DdpgAgent",
    "Td3Agent",
    "make_agent",
    "StepRecord",
    "train",
]

ALGORITHMS = ("ddpg", "ca-ddpg", "td3")

# default initial perturbation scale per algorithm (config-overridable)
_ETA0_PRESET = {"ddpg": 0.0, "ca-ddpg": 0.1, "td3": 0.1}


@dataclass
class AgentConfig:
    """Learner hyper-parameters; defaults follow the reference parameter table."""

    algorithm: str = "ca-ddpg"
    discount: float = 0.8          # lambda
    tau: float = 0.001             # soft-update rate
    actor_lr: float = 0.001        # xi^a
    critic_lr: float = 0.001       # xi^c
    actor_decay: float = 1e-5      # d_a, inverse-time lr decay
    critic_decay: float = 1e-5     # d_c
    batch_size: int = 16           # b_m
    buffer_capacity: int = 80000   # B
    sync_period: int = 1           # J_sync, steps between soft updates
    warmup: int = 500              # transitions stored before updates begin
    eta0: float | None = None      # None -> per-algorithm preset
    eta_decay_steps: float | None = None   # None -> total_steps / 4
    actor_hidden: tuple = (256, 256)
    critic_hidden: tuple = (256, 256)
    conv_channels: tuple = (32, 32)
    kernel_size: int = 1           # k_s
    padding: int = 0               # p
    stride: int = 1                # s_d
    policy_delay: int = 2          # TD3: critic updates per actor update
    target_noise: float = 0.2      # TD3: target action smoothing scale
    noise_clip: float = 0.5        # TD3: smoothing noise clip
    actor_l2: float = 0.0          # optional L2 weight decay (saturation guard)
    critic_l2: float = 0.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")

    def resolved_eta0(self) -> float:
        return _ETA0_PRESET[self.algorithm] if self.eta0 is None else self.eta0


@dataclass
class Transition:
    s: np.ndarray
    a: np.ndarray
    r: float
    s_next: np.ndarray


class ReplayBuffer:
    """FIFO ring buffer of transitions with uniform minibatch sampling."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        self.capacity = capacity
        self.s = np.zeros((capacity, state_dim))
        self.a = np.zeros((capacity, action_dim))
        self.r = np.zeros(capacity)
        self.s_next = np.zeros((capacity, state_dim))
        self.size = 0
        self.cursor = 0

    def __len__(self):
        return self.size

    def push(self, s, a, r, s_next):
        i = self.cursor
        self.s[i] = s
        self.a[i] = a
        self.r[i] = r
        self.s_next[i] = s_next
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: RngStream):
        """Uniform sample without replacement within the batch."""
        if batch_size > self.size:
            raise ValueError(f"buffer holds {self.size} < batch of {batch_size}")
        idx = rng.choice(self.size, batch_size, replace=False)
        return self.s[idx], self.a[idx], self.r[idx], self.s_next[idx]


class NoiseSchedule:
    """Exponentially decaying perturbation scale eta_t = eta0 * exp(-t / T)."""

    def __init__(self, eta0: float, decay_steps: float):
        if eta0 < 0:
            raise ValueError(f"eta0 must be >= 0, got {eta0}")
        if decay_steps <= 0:
            raise ValueError(f"decay_steps must be positive, got {decay_steps}")
        self.eta0 = eta0
        self.decay_steps = decay_steps

    def eta(self, step: int) -> float:
        return self.eta0 * float(np.exp(-step / self.decay_steps))


def explore(actor_out: np.ndarray, eta: float, rng) -> np.ndarray:
    """Perturbed action a = a_i + eta * o with o ~ N(0, I)."""
    return actor_out + eta * rng.normal(size=actor_out.shape)


class DdpgAgent:
    """DDPG learner; becomes CA-DDPG when built with a convolutional critic."""

    n_critics = 1

    def __init__(self, state_dim: int, action_dim: int, cfg: AgentConfig,
                 rng: RngStream, conv_critic: bool):
        self.cfg = cfg
        self.actor = nn.Actor(state_dim, action_dim, cfg.actor_hidden, rng)
        conv = None
        if conv_critic:
            conv = nn.ConvSpec(cfg.conv_channels, cfg.kernel_size, cfg.stride, cfg.padding)
        self.critic = nn.Critic(state_dim, action_dim, cfg.critic_hidden, conv, rng)
        # targets start as exact copies of the training networks
        self.actor_target = nn.Actor(state_dim, action_dim, cfg.actor_hidden, rng)
        self.critic_target = nn.Critic(state_dim, action_dim, cfg.critic_hidden, conv, rng)
        nn.copy_params(self.actor_target, self.actor)
        nn.copy_params(self.critic_target, self.critic)
        self.adam_actor = nn.Adam(self.actor.params(), cfg.actor_lr, cfg.actor_decay,
                                  weight_decay=cfg.actor_l2)
        self.adam_critic = nn.Adam(self.critic.params(), cfg.critic_lr, cfg.critic_decay,
                                   weight_decay=cfg.critic_l2)
        self.critic_updates = 0

    def act(self, state: np.ndarray) -> np.ndarray:
        return self.actor.forward(state[None, :])[0]

    def compute_targets(self, rewards: np.ndarray, next_states: np.ndarray) -> np.ndarray:
        """Bootstrapped targets y = r + lambda * Q_target(s', actor_target(s'))."""
        a_next = self.actor_target.forward(next_states)
        q_next = self.critic_target.forward(next_states, a_next)
        return rewards + self.cfg.discount * q_next

    def update_critic(self, states, actions, targets) -> float:
        """One Adam step on the minibatch mean-squared Bellman error."""
        batch = states.shape[0]
        self.critic.zero_grad()
        q = self.critic.forward(states, actions)
        err = q - targets
        self.critic.backward(2.0 * err / batch)
        self.adam_critic.step(self.critic.grads())
        self.critic_updates += 1
        return float(np.mean(err**2))

    def update_actor(self, states) -> float:
        """Ascend mean Q(s, pi(s)) through the critic's action gradient."""
        batch = states.shape[0]
        a = self.actor.forward(states)
        self.critic.zero_grad()   # scratch use only; its optimizer is not stepped
        q = self.critic.forward(states, a)
        _, ga = self.critic.backward(-np.full(batch, 1.0 / batch))
        self.actor.zero_grad()
        self.actor.backward(ga)
        self.adam_actor.step(self.actor.grads())
        return float(q.mean())

    def sync_targets(self):
        nn.soft_update(self.actor_target, self.actor, self.cfg.tau)
        nn.soft_update(self.critic_target, self.critic, self.cfg.tau)

    def learn_step(self, states, actions, rewards, next_states, global_step: int,
                   rng: RngStream) -> float:
        loss = self.update_critic(states, actions,
                                  self.compute_targets(rewards, next_states))
        self.update_actor(states)
        if (global_step + 1) % self.cfg.sync_period == 0:
            self.sync_targets()
        return loss

    def _nets(self) -> dict:
        return {
            "actor": self.actor,
            "actor_target": self.actor_target,
            "critic": self.critic,
            "critic_target": self.critic_target,
        }

    def save(self, path):
        nn.save_checkpoint(path, self._nets())

    def load(self, path):
        nn.load_checkpoint(path, self._nets())


class Td3Agent(DdpgAgent):
    """Twin-delayed DDPG: min of two target critics, delayed policy updates,
    clipped Gaussian smoothing of target actions."""

    n_critics = 2

    def __init__(self, state_dim: int, action_dim: int, cfg: AgentConfig,
                 rng: RngStream):
        super().__init__(state_dim, action_dim, cfg, rng, conv_critic=False)
        self.critic2 = nn.Critic(state_dim, action_dim, cfg.critic_hidden, None, rng)
        self.critic2_target = nn.Critic(state_dim, action_dim, cfg.critic_hidden, None, rng)
        nn.copy_params(self.critic2_target, self.critic2)
        self.adam_critic2 = nn.Adam(self.critic2.params(), cfg.critic_lr, cfg.critic_decay,
                                    weight_decay=cfg.critic_l2)

    def target_q_pair(self, next_states, rng: RngStream):
        """Per-critic target Q values at the smoothed target action."""
        a_next = self.actor_target.forward(next_states)
        noise = np.clip(self.cfg.target_noise * rng.normal(size=a_next.shape),
                        -self.cfg.noise_clip, self.cfg.noise_clip)
        a_next = np.clip(a_next + noise, -1.0, 1.0)
        q1 = self.critic_target.forward(next_states, a_next)
        q2 = self.critic2_target.forward(next_states, a_next)
        return q1, q2

    def compute_targets(self, rewards, next_states, rng: RngStream = None):
        q1, q2 = self.target_q_pair(next_states, rng)
        return rewards + self.cfg.discount * np.minimum(q1, q2)

    def update_critic(self, states, actions, targets) -> float:
        loss = super().update_critic(states, actions, targets)
        self.critic2.zero_grad()
        q = self.critic2.forward(states, actions)
        err = q - targets
        self.critic2.backward(2.0 * err / states.shape[0])
        self.adam_critic2.step(self.critic2.grads())
        return loss

    def sync_targets(self):
        super().sync_targets()
        nn.soft_update(self.critic2_target, self.critic2, self.cfg.tau)

    def learn_step(self, states, actions, rewards, next_states, global_step: int,
                   rng: RngStream) -> float:
        loss = self.update_critic(states, actions,
                                  self.compute_targets(rewards, next_states, rng))
        if self.critic_updates % self.cfg.policy_delay == 0:
            self.update_actor(states)
            self.sync_targets()
        return loss

    def _nets(self) -> dict:
        nets = super()._nets()
        nets["critic2"] = self.critic2
        nets["critic2_target"] = self.critic2_target
        return nets


def make_agent(state_dim: int, action_dim: int, cfg: AgentConfig, rng: RngStream):
    if cfg.algorithm == "td3":
        return Td3Agent(state_dim, action_dim, cfg, rng)
    return DdpgAgent(state_dim, action_dim, cfg, rng,
                     conv_critic=(cfg.algorithm == "ca-ddpg"))


@dataclass
class StepRecord:
    step: int
    reward: float
    eta: float
    critic_loss: float
    wall_ms: float


def train(env: StarRisUavEnv, agent_cfg: AgentConfig, episodes: int,
          steps_per_episode: int, rng: RngStream, timer=time.perf_counter,
          agent=None) -> list:
    """Run the full training loop and return the per-step metric stream.

    rng is a dedicated root for the learner; sub-streams (weights,
    exploration, minibatch sampling) are derived from it with fixed child
    ids, so a run is a pure function of (env seed, rng seed, config).
    Pass timer=None for fully deterministic records (wall_ms = 0).
    """
    cfg = env.cfg
    sdim = state_dim(cfg)
    adim = action_dim(cfg)
    init_rng = rng.child(0)
    noise_rng = rng.child(1)
    buffer_rng = rng.child(2)
    if agent is None:
        agent = make_agent(sdim, adim, agent_cfg, init_rng)
    buffer = ReplayBuffer(agent_cfg.buffer_capacity, sdim, adim)
    total = episodes * steps_per_episode
    decay_steps = agent_cfg.eta_decay_steps or max(total / 4.0, 1.0)
    sched = NoiseSchedule(agent_cfg.resolved_eta0(), decay_steps)
    warmup = max(agent_cfg.batch_size, agent_cfg.warmup)
    clock = timer if timer is not None else (lambda: 0.0)

    records = []
    gstep = 0
    for _ in range(episodes):
        obs = env.reset()
        for _ in range(steps_per_episode):
            t0 = clock()
            eta = sched.eta(gstep)
            raw = explore(agent.act(obs.flat), eta, noise_rng)
            result = env.step(raw)
            # the learner optimizes the rate the system believes from its
            # channel estimate; the recorded reward is the delivered rate
            buffer.push(obs.flat, raw, result.believed_reward, result.obs.flat)
            loss = float("nan")
            if len(buffer) >= warmup:
                s, a, r, s2 = buffer.sample(agent_cfg.batch_size, buffer_rng)
                loss = agent.learn_step(s, a, r, s2, gstep, noise_rng)
            obs = result.obs
            records.append(StepRecord(step=gstep, reward=result.reward, eta=eta,
                                      critic_loss=loss,
                                      wall_ms=(clock() - t0) * 1e3))
            gstep += 1
    return records
