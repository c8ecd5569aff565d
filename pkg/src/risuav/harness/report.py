"""Figure rendering for run and sweep outputs.

The CSV files remain the source of truth; this module draws the standard
views next to them: instantaneous plus running-average reward versus time
step for a single run, and final-reward mean with a stdev band across an
axis for a sweep summary.  Figures are written as PNG files with the
headless Agg backend.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import read_metrics_csv

__all__ = ["render_run_curves", "render_sweep_summary", "render_path"]


def render_run_curves(csv_path, out_path=None) -> str:
    """Reward and average-reward curves for one metrics CSV."""
    csv_path = Path(csv_path)
    rows = read_metrics_csv(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    steps = [r.step for r in rows]
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax0.plot(steps, [r.reward for r in rows], lw=0.6, color="tab:blue", alpha=0.6,
             label="instantaneous")
    ax0.plot(steps, [r.avg_reward for r in rows], lw=1.6, color="tab:red",
             label="running average")
    ax0.set_ylabel("sum rate (bit/s/Hz)")
    ax0.legend(loc="lower right")
    ax0.set_title(csv_path.stem)
    ax1.plot(steps, [r.eta for r in rows], lw=1.0, color="tab:green")
    ax1.set_ylabel("exploration eta")
    ax1.set_xlabel("time step")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return str(out_path)


def render_sweep_summary(summary_path, out_path=None) -> str:
    """Final-window reward (mean with stdev band) per sweep cell."""
    summary_path = Path(summary_path)
    out_path = Path(out_path) if out_path else summary_path.with_suffix(".png")
    names, means, stds = [], [], []
    with open(summary_path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            name, _, mean, std, _ = line.rstrip("\n").split(",")
            names.append(name)
            means.append(float(mean))
            stds.append(float(std))
    fig, ax = plt.subplots(figsize=(7, 4))
    x = range(len(names))
    ax.errorbar(x, means, yerr=stds, fmt="o-", capsize=4, color="tab:blue")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("final-window sum rate (bit/s/Hz)")
    ax.set_title(summary_path.parent.name)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return str(out_path)


def render_path(path) -> list:
    """Render every metrics/summary CSV under ``path`` (file or directory)."""
    path = Path(path)
    targets = [path] if path.is_file() else sorted(path.glob("**/*.csv"))
    written = []
    for csv_file in targets:
        if csv_file.name == "summary.csv":
            written.append(render_sweep_summary(csv_file))
        else:
            written.append(render_run_curves(csv_file))
    return written
