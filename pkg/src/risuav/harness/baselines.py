"""Reference policies: uniform-random actions and best-of-T random search.

The random policy is the lower-bound baseline the learning smoke tests
compare against; random search over feasible actions on one frozen
channel draw gives a cheap near-oracle for tiny scenarios.
"""

from __future__ import annotations

import time

import numpy as np

from ..agents import StepRecord
from ..env import (ChannelSet, StarRisUavEnv, SystemConfig, action_dim,
                   project_action, sum_rate)
from ..numerics import RngStream

__all__ = ["random_policy", "random_search_best"]


def random_policy(env: StarRisUavEnv, steps: int, rng: RngStream,
                  episodes: int = 1, timer=time.perf_counter) -> list:
    """Execute uniform[-1, 1] raw actions and record the reward stream."""
    clock = timer if timer is not None else (lambda: 0.0)
    records = []
    gstep = 0
    for _ in range(episodes):
        env.reset()
        for _ in range(steps):
            t0 = clock()
            raw = rng.uniform(-1.0, 1.0, action_dim(env.cfg))
            result = env.step(raw)
            records.append(StepRecord(step=gstep, reward=result.reward, eta=0.0,
                                      critic_loss=float("nan"),
                                      wall_ms=(clock() - t0) * 1e3))
            gstep += 1
    return records


def random_search_best(channels: ChannelSet, cfg: SystemConfig, trials: int,
                       rng: RngStream):
    """Best of ``trials`` random feasible actions on one fixed channel draw.

    Trials are drawn sequentially from ``rng``, so a larger trial budget
    with the same stream extends the smaller one and the best rate is
    monotone non-decreasing in ``trials``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    best_rate = -np.inf
    best_action = None
    for _ in range(trials):
        raw = rng.uniform(-1.0, 1.0, action_dim(cfg))
        act = project_action(raw, cfg)
        rate, _ = sum_rate(channels, act, cfg.sigma2)
        if rate > best_rate:
            best_rate = rate
            best_action = act
    return best_action, float(best_rate)
