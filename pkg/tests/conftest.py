import numpy as np
import pytest

from risuav.env import SystemConfig
from risuav.numerics import RngStream


@pytest.fixture
def rng():
    return RngStream(12345, 0)


@pytest.fixture
def tiny_cfg():
    """The small scenario used throughout: M=2, K=1, N=4, Pt = 10 dB."""
    return SystemConfig(M=2, N=4, K=1)


def random_complex(rng: RngStream, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
