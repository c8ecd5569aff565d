"""Experiment configuration and the flat key = value config-file format.

A config file is UTF-8 text with one ``key = value`` assignment per line
and ``#`` comments; unknown keys are rejected with the offending line
number.  Every key has a reference default (see the README key table), so
an empty file is a complete full-scale experiment description.

Power-style inputs are decibel quantities: ``Pt_dB`` is dB relative to
1 W and ``noise_dBm`` is dBm; both are converted to linear watts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..agents import ALGORITHMS, AgentConfig
from ..env import SystemConfig

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "parse_assignments"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything one run needs: scenario, learner, schedule and output knobs.

    ``steps`` is the per-episode step count; the full-scale reference
    default is 80000 steps in a single episode (desk-scale runs override
    it from the CLI).
    """

    # scenario
    M: int = 4
    N: int = 16
    K: int = 4
    Pt_dB: float = 10.0
    noise_dBm: float = -110.0
    bs_xy: tuple = (0.0, 0.0)
    bs_height: float = 10.0
    uav_height: float = 30.0
    uav_init: tuple = (40.0, 20.0)
    uav_bounds: tuple = (0.0, 100.0, 0.0, 100.0)
    user_xy_reflect: tuple = (80.0, 0.0)
    user_xy_transmit: tuple = (80.0, 80.0)
    # learner
    algo: str = "ca-ddpg"
    discount: float = 0.8
    tau: float = 0.001
    actor_lr: float = 0.001
    critic_lr: float = 0.001
    actor_decay: float = 1e-5
    critic_decay: float = 1e-5
    batch_size: int = 16
    buffer_size: int = 80000
    sync_period: int = 1
    warmup: int = 500
    eta0: float = -1.0             # < 0 means the per-algorithm preset
    eta_decay_steps: float = 0.0   # 0 means total_steps / 4
    actor_hidden: tuple = (256, 256)
    critic_hidden: tuple = (256, 256)
    conv_channels: tuple = (32, 32)
    kernel_size: int = 1
    padding: int = 0
    stride: int = 1
    # schedule
    episodes: int = 1
    steps: int = 80000
    seed: int = 0
    delta: float = 0.0             # CSI uncertainty

    def system(self) -> SystemConfig:
        k = self.K
        return SystemConfig(
            M=self.M, N=self.N, K=k,
            pt=10.0 ** (self.Pt_dB / 10.0),
            sigma2=10.0 ** ((self.noise_dBm - 30.0) / 10.0),
            bs_xy=self.bs_xy,
            bs_height=self.bs_height,
            uav_height=self.uav_height,
            uav_init=self.uav_init,
            uav_bounds=self.uav_bounds,
            user_xy_reflect=np.tile(self.user_xy_reflect, (k, 1)),
            user_xy_transmit=np.tile(self.user_xy_transmit, (k, 1)),
        )

    def agent(self) -> AgentConfig:
        return AgentConfig(
            algorithm=self.algo,
            discount=self.discount,
            tau=self.tau,
            actor_lr=self.actor_lr,
            critic_lr=self.critic_lr,
            actor_decay=self.actor_decay,
            critic_decay=self.critic_decay,
            batch_size=self.batch_size,
            buffer_capacity=self.buffer_size,
            sync_period=self.sync_period,
            warmup=self.warmup,
            eta0=None if self.eta0 < 0 else self.eta0,
            eta_decay_steps=self.eta_decay_steps or None,
            actor_hidden=self.actor_hidden,
            critic_hidden=self.critic_hidden,
            conv_channels=self.conv_channels,
            kernel_size=self.kernel_size,
            padding=self.padding,
            stride=self.stride,
        )

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _parse_tuple(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _parse_int_tuple(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def _parse_algo(text: str) -> str:
    algo = text.strip()
    if algo not in (*ALGORITHMS, "random"):
        raise ValueError(f"must be one of {(*ALGORITHMS, 'random')}")
    return algo


_PARSERS = {
    "M": int, "N": int, "K": int,
    "Pt_dB": float, "noise_dBm": float,
    "bs_xy": _parse_tuple, "bs_height": float, "uav_height": float,
    "uav_init": _parse_tuple, "uav_bounds": _parse_tuple,
    "user_xy_reflect": _parse_tuple, "user_xy_transmit": _parse_tuple,
    "algo": _parse_algo,
    "discount": float, "tau": float,
    "actor_lr": float, "critic_lr": float,
    "actor_decay": float, "critic_decay": float,
    "batch_size": int, "buffer_size": int, "sync_period": int, "warmup": int,
    "eta0": float, "eta_decay_steps": float,
    "actor_hidden": _parse_int_tuple, "critic_hidden": _parse_int_tuple,
    "conv_channels": _parse_int_tuple,
    "kernel_size": int, "padding": int, "stride": int,
    "episodes": int, "steps": int, "seed": int, "delta": float,
}

_RANGE_CHECKS = {
    "tau": lambda v: 0.0 < v <= 1.0 or "tau must be in (0, 1]",
    "discount": lambda v: 0.0 < v <= 1.0 or "discount must be in (0, 1]",
    "batch_size": lambda v: v >= 1 or "batch_size must be >= 1",
    "buffer_size": lambda v: v >= 1 or "buffer_size must be >= 1",
    "delta": lambda v: 0.0 <= v < 1.0 or "delta must be in [0, 1)",
    "M": lambda v: v >= 1 or "M must be >= 1",
    "N": lambda v: v >= 1 or "N must be >= 1",
    "K": lambda v: v >= 1 or "K must be >= 1",
    "steps": lambda v: v >= 1 or "steps must be >= 1",
    "episodes": lambda v: v >= 1 or "episodes must be >= 1",
    "seed": lambda v: 0 <= v < 2**64 or "seed must fit in 64 bits",
}


def _check_range(key: str, value):
    check = _RANGE_CHECKS.get(key)
    if check is None:
        return
    result = check(value)
    if result is not True:
        raise ConfigError(f"key {key!r}: {result}")


def parse_assignments(items: dict) -> dict:
    """Validate a {key: string} mapping into typed config fields."""
    out = {}
    for key, text in items.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}")
        try:
            value = _PARSERS[key](text)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: bad value {text!r} ({exc})") from None
        _check_range(key, value)
        out[key] = value
    return out


def load_config(path) -> ExperimentConfig:
    """Parse a config file, applying reference defaults for absent keys."""
    items = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, rawline in enumerate(fh, start=1):
            line = rawline.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {rawline.rstrip()!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            text = text.strip()
            if key in items:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            items[key] = (lineno, text)
    parsed = {}
    for key, (lineno, text) in items.items():
        try:
            parsed.update(parse_assignments({key: text}))
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return ExperimentConfig(**parsed)
