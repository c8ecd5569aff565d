"""Single-run and sweep drivers.

A run is a pure function of its ExperimentConfig (the seed is part of the
config), emitting one metrics CSV.  A sweep is a cross product of config
overrides times a seed list; each cell-seed pair runs independently and
the summary aggregates the final-window reward mean and stdev across
seeds.  Cell failures are recorded in the summary and do not abort the
remaining cells.

RNG stream ids (all derived from the run seed): 0 environment,
1 learner root, 2 baseline policy.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..agents import train
from ..env import StarRisUavEnv
from ..numerics import RngStream
from . import baselines
from .config import ExperimentConfig
from .metrics import (attach_running_average, final_window_mean,
                      read_metrics_csv, write_metrics_csv)

__all__ = ["run_experiment", "SweepCell", "SweepResult", "run_sweep",
            "write_sweep_summary", "SUMMARY_HEADER"]


def run_experiment(exp: ExperimentConfig, timer=time.perf_counter) -> list:
    """Train (or roll out the random baseline) and return MetricsRows."""
    root = RngStream(exp.seed, 0)
    env = StarRisUavEnv(exp.system(), root.child(0), csi_delta=exp.delta)
    if exp.algo == "random":
        records = baselines.random_policy(env, exp.steps, root.child(2),
                                          episodes=exp.episodes, timer=timer)
    else:
        records = train(env, exp.agent(), exp.episodes, exp.steps,
                        root.child(1), timer=timer)
    return attach_running_average(records)


@dataclass
class SweepCell:
    label: str
    overrides: dict
    seed: int
    final_reward: float    # nan when the run failed
    csv_path: str
    error: str = ""


@dataclass
class SweepResult:
    cells: list
    summary_path: str

    def failed(self) -> list:
        return [c for c in self.cells if c.error]


def _cell_label(overrides: dict, seed: int) -> str:
    parts = [f"{k}-{_slug(v)}" for k, v in overrides.items()]
    parts.append(f"seed-{seed}")
    return "_".join(parts) if parts else f"seed-{seed}"


def _slug(v) -> str:
    return str(v).replace(" ", "").replace("/", "-").replace(",", "+")


SUMMARY_HEADER = "cell,seeds,final_reward_mean,final_reward_std,failures"


def run_sweep(base: ExperimentConfig, grid: dict, seeds, out_dir,
              timer=time.perf_counter, window: float = 0.1) -> SweepResult:
    """Run every grid cell for every seed; write per-run CSVs and a summary.

    ``grid`` maps ExperimentConfig field names to value lists; the sweep
    covers their cross product.  Returns the collected cells; the summary
    CSV has one line per cell aggregated over seeds.
    """
    if not grid:
        grid = {}
    keys = list(grid.keys())
    value_lists = [grid[k] for k in keys]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = []
    for combo in itertools.product(*value_lists) if keys else [()]:
        overrides = dict(zip(keys, combo))
        for seed in seeds:
            label = _cell_label(overrides, seed)
            csv_path = out_dir / f"{label}.csv"
            try:
                exp = base.with_overrides(seed=seed, **overrides)
                rows = run_experiment(exp, timer=timer)
                write_metrics_csv(rows, csv_path)
                # aggregate from the file contents so the summary is an
                # exact function of the written metric files
                written = read_metrics_csv(csv_path)
                cells.append(SweepCell(label=label, overrides=overrides, seed=seed,
                                       final_reward=final_window_mean(written, window),
                                       csv_path=str(csv_path)))
            except Exception as exc:  # record and continue with the next cell
                cells.append(SweepCell(label=label, overrides=overrides, seed=seed,
                                       final_reward=float("nan"),
                                       csv_path=str(csv_path),
                                       error=f"{type(exc).__name__}: {exc}"))
    summary_path = out_dir / "summary.csv"
    write_sweep_summary(cells, keys, summary_path)
    return SweepResult(cells=cells, summary_path=str(summary_path))


def _fmt(x: float) -> str:
    return format(x, ".9g")


def write_sweep_summary(cells, keys, path):
    """Aggregate per-cell final rewards (mean and stdev across seeds)."""
    groups = {}
    for c in cells:
        cell_key = tuple(c.overrides.get(k) for k in keys)
        groups.setdefault(cell_key, []).append(c)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for cell_key, members in groups.items():
            ok = [m.final_reward for m in members if not m.error]
            mean = float(np.mean(ok)) if ok else float("nan")
            std = float(np.std(ok)) if ok else float("nan")
            name = "_".join(f"{k}-{_slug(v)}" for k, v in zip(keys, cell_key)) or "base"
            fh.write(f"{name},{len(members)},{_fmt(mean)},{_fmt(std)},"
                     f"{sum(1 for m in members if m.error)}\n")
