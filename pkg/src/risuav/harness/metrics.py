"""Metric rows, running averages and the CSV wire format.

CSV contract: header ``step,reward,avg_reward,eta,critic_loss,wall_ms``,
one row per step, values printed with 9 significant digits, LF line
endings, UTF-8.  The avg_reward column is the running mean of the reward
column up to and including the row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MetricsRow",
    "CSV_HEADER",
    "avg_reward",
    "attach_running_average",
    "write_metrics_csv",
    "read_metrics_csv",
    "final_window_mean",
]

CSV_HEADER = "step,reward,avg_reward,eta,critic_loss,wall_ms"


@dataclass
class MetricsRow:
    step: int
    reward: float
    avg_reward: float
    eta: float
    critic_loss: float
    wall_ms: float


def avg_reward(rewards, i: int) -> float:
    """Arithmetic mean of the first i rewards (i is 1-based)."""
    if not 1 <= i <= len(rewards):
        raise ValueError(f"i must be in [1, {len(rewards)}], got {i}")
    return float(np.mean(np.asarray(rewards, dtype=float)[:i]))


def attach_running_average(records) -> list:
    """Wrap agent step records into MetricsRows with the running reward mean."""
    rows = []
    total = 0.0
    for i, rec in enumerate(records, start=1):
        total += rec.reward
        rows.append(MetricsRow(step=rec.step, reward=rec.reward,
                               avg_reward=total / i, eta=rec.eta,
                               critic_loss=rec.critic_loss, wall_ms=rec.wall_ms))
    return rows


def _fmt(x: float) -> str:
    return format(x, ".9g")


def write_metrics_csv(rows, path):
    """Write the metric stream; see the module docstring for the format."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in rows:
                fh.write(f"{r.step},{_fmt(r.reward)},{_fmt(r.avg_reward)},"
                         f"{_fmt(r.eta)},{_fmt(r.critic_loss)},{_fmt(r.wall_ms)}\n")
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc


def read_metrics_csv(path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            step, reward, avg, eta, loss, wall = line.rstrip("\n").split(",")
            rows.append(MetricsRow(step=int(step), reward=float(reward),
                                   avg_reward=float(avg), eta=float(eta),
                                   critic_loss=float(loss), wall_ms=float(wall)))
    return rows


def final_window_mean(rows, fraction: float = 0.1) -> float:
    """Converged-metric scalar: mean reward over the last ``fraction`` of steps."""
    n = max(1, int(round(len(rows) * fraction)))
    return float(np.mean([r.reward for r in rows[-n:]]))
