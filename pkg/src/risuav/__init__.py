"""STAR-RIS-UAV downlink simulator and deep-RL optimizer suite.

Modules:
  numerics -- complex linear algebra kernels and seedable random streams
  env      -- channels, rates, constraint projection, state encoding, dynamics
  nn       -- from-scratch dense/conv network framework with manual backprop
  agents   -- replay buffer, exploration schedule, DDPG / CA-DDPG / TD3
  harness  -- experiment configs, baselines, sweeps, CSV metrics, figures, CLI
"""

__version__ = "0.1.0"

from .numerics import RngStream

__all__ = ["RngStream", "__version__"]
