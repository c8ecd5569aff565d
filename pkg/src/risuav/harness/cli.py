"""Command-line interface.

Subcommands:
  run       -- one training (or random-baseline) run, writes metrics.csv
  sweep     -- cross product of axis values times seeds, per-run CSVs + summary
  baseline  -- random policy rollout or best-of-T random search
  gradcheck -- finite-difference verification of the network gradients
  report    -- render figures for existing CSV output

Option precedence: command line > environment variables > config file >
reference defaults.  Environment variables mirror the long flags as
RISUAV_<NAME> (RISUAV_SEED, RISUAV_ALGO, RISUAV_STEPS, RISUAV_EPISODES,
RISUAV_PT_DB, RISUAV_DELTA, RISUAV_OUT).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .. import nn
from ..agents import ALGORITHMS
from ..env import StarRisUavEnv, action_dim, generate_channels, state_dim
from ..numerics import RngStream
from . import baselines, report
from .config import ConfigError, ExperimentConfig, load_config, parse_assignments
from .metrics import attach_running_average, final_window_mean, write_metrics_csv
from .runner import run_experiment, run_sweep

_ENV_FLAGS = {
    "seed": ("RISUAV_SEED", int),
    "algo": ("RISUAV_ALGO", str),
    "steps": ("RISUAV_STEPS", int),
    "episodes": ("RISUAV_EPISODES", int),
    "Pt_dB": ("RISUAV_PT_DB", float),
    "delta": ("RISUAV_DELTA", float),
}


def _build_config(args) -> ExperimentConfig:
    exp = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for field, (env_name, cast) in _ENV_FLAGS.items():
        if env_name in os.environ:
            try:
                overrides[field] = cast(os.environ[env_name])
            except ValueError:
                raise ConfigError(f"environment variable {env_name}: "
                                  f"bad value {os.environ[env_name]!r}")
    cli_map = {
        "seed": args.seed, "algo": args.algo, "steps": args.steps,
        "episodes": args.episodes, "Pt_dB": args.pt_db, "delta": args.delta,
    }
    overrides.update({k: v for k, v in cli_map.items() if v is not None})
    if args.set:
        pairs = {}
        for kv in args.set:
            if "=" not in kv:
                raise ConfigError(f"--set expects KEY=VALUE, got {kv!r}")
            key, _, value = kv.partition("=")
            pairs[key.strip()] = value.strip()
        overrides.update(parse_assignments(pairs))
    return exp.with_overrides(**overrides)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("RISUAV_OUT") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, default=None, help="config file (key = value lines)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--algo", choices=(*ALGORITHMS, "random"), default=None)
    p.add_argument("--steps", type=int, default=None, help="steps per episode")
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--pt-db", type=float, default=None, dest="pt_db")
    p.add_argument("--delta", type=float, default=None, help="CSI uncertainty in [0, 1)")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--set", nargs="*", metavar="KEY=VALUE", default=None,
                   help="extra config overrides by key")
    p.add_argument("--plot", action="store_true", help="render figures next to the CSVs")
    p.add_argument("--no-timing", action="store_true",
                   help="write wall_ms as 0 for bit-reproducible output")


def _parse_list(text: str, cast):
    return [cast(v) for v in text.split(",")]


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risuav",
                                     description="STAR-RIS-UAV downlink DRL experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single experiment")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="grid of experiments")
    _add_common(p_sweep)
    p_sweep.add_argument("--grid-pt-db", type=str, default=None,
                         help="comma list of Pt_dB values")
    p_sweep.add_argument("--grid-delta", type=str, default=None,
                         help="comma list of CSI deltas")
    p_sweep.add_argument("--grid-algo", type=str, default=None,
                         help="comma list of algorithms")
    p_sweep.add_argument("--seeds", type=str, default="0,1,2",
                         help="comma list of seeds")

    p_base = sub.add_parser("baseline", help="random policy / random search")
    _add_common(p_base)
    p_base.add_argument("--trials", type=int, default=0,
                        help="run best-of-T random search instead of a rollout")

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p_grad.add_argument("--tolerance", type=float, default=1e-4)
    p_grad.add_argument("--seed", type=int, default=0)

    p_rep = sub.add_parser("report", help="render figures for existing output")
    p_rep.add_argument("paths", nargs="+", type=Path)
    return parser


def cmd_run(args) -> int:
    exp = _build_config(args)
    out = _out_dir(args)
    timer = None if args.no_timing else time.perf_counter
    rows = run_experiment(exp, timer=timer)
    csv_path = out / f"run_{exp.algo}_seed{exp.seed}.csv"
    write_metrics_csv(rows, csv_path)
    print(f"wrote {csv_path}")
    print(f"final-window mean reward: {final_window_mean(rows):.4f} bit/s/Hz "
          f"({len(rows)} steps, total wall {sum(r.wall_ms for r in rows) / 1e3:.1f} s)")
    if args.plot:
        print(f"wrote {report.render_run_curves(csv_path)}")
    return 0


def cmd_sweep(args) -> int:
    exp = _build_config(args)
    out = _out_dir(args)
    grid = {}
    if args.grid_pt_db:
        grid["Pt_dB"] = _parse_list(args.grid_pt_db, float)
    if args.grid_delta:
        grid["delta"] = _parse_list(args.grid_delta, float)
    if args.grid_algo:
        grid["algo"] = _parse_list(args.grid_algo, str)
    seeds = _parse_list(args.seeds, int)
    timer = None if args.no_timing else time.perf_counter
    result = run_sweep(exp, grid, seeds, out, timer=timer)
    print(f"wrote {len(result.cells)} runs and {result.summary_path}")
    if args.plot:
        for path in report.render_path(out):
            print(f"wrote {path}")
    failed = result.failed()
    for cell in failed:
        print(f"FAILED {cell.label}: {cell.error}", file=sys.stderr)
    return 1 if failed else 0


def cmd_baseline(args) -> int:
    exp = _build_config(args)
    out = _out_dir(args)
    root = RngStream(exp.seed, 0)
    cfg = exp.system()
    if args.trials > 0:
        channels = generate_channels(cfg, cfg.uav_init, root.child(0))
        _, best = baselines.random_search_best(channels, cfg, args.trials, root.child(2))
        print(f"random search best over {args.trials} trials: {best:.4f} bit/s/Hz")
        return 0
    env = StarRisUavEnv(cfg, root.child(0), csi_delta=exp.delta)
    timer = None if args.no_timing else time.perf_counter
    records = baselines.random_policy(env, exp.steps, root.child(2),
                                      episodes=exp.episodes, timer=timer)
    rows = attach_running_average(records)
    csv_path = out / f"baseline_random_seed{exp.seed}.csv"
    write_metrics_csv(rows, csv_path)
    print(f"wrote {csv_path}")
    print(f"mean reward: {np.mean([r.reward for r in rows]):.4f} bit/s/Hz")
    if args.plot:
        print(f"wrote {report.render_run_curves(csv_path)}")
    return 0


def cmd_gradcheck(args) -> int:
    """Verify analytic gradients of a small actor and both critic shapes."""
    rng = RngStream(args.seed, 7)
    from ..env import SystemConfig

    cfg = SystemConfig(M=2, N=4, K=1)
    sdim, adim = state_dim(cfg), action_dim(cfg)
    batch = 3
    s = rng.normal(size=(batch, sdim))
    a = rng.normal(size=(batch, adim))
    failures = 0
    actor = nn.Actor(sdim, adim, hidden=(16, 16), rng=rng)
    rep = nn.check_actor_gradients(actor, s, rng, tol=args.tolerance)
    print(f"actor:        max rel err {rep.max_rel_err:.3e} at {rep.worst} "
          f"({rep.n_checked} grads) -> {'ok' if rep.passed else 'FAIL'}")
    failures += not rep.passed
    for label, conv in (("critic plain", None),
                        ("critic conv", nn.ConvSpec(channels=(4, 4)))):
        critic = nn.Critic(sdim, adim, hidden=(16, 16), conv=conv, rng=rng)
        rep = nn.check_critic_gradients(critic, s, a, tol=args.tolerance)
        print(f"{label}: max rel err {rep.max_rel_err:.3e} at {rep.worst} "
              f"({rep.n_checked} grads) -> {'ok' if rep.passed else 'FAIL'}")
        failures += not rep.passed
    return 1 if failures else 0


def cmd_report(args) -> int:
    for path in args.paths:
        for out in report.render_path(path):
            print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "baseline": cmd_baseline,
        "gradcheck": cmd_gradcheck,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
