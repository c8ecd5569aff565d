"""Complex linear-algebra kernels and seedable random streams.

Everything downstream (channels, rates, networks) is built on the handful
of primitives in this module so that numerical conventions live in one
place: complex matrices are dense numpy ``complex128`` arrays in row-major
order, and all randomness flows through :class:`RngStream`.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RngStream",
    "complex_matmul",
    "hermitian",
    "trace_gram",
    "sample_complex_gaussian",
]


class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``.

    Backed by the counter-based Philox-4x64 bit generator with the pair
    ``(seed, stream_id)`` as cipher key, so the same pair reproduces the
    same draw sequence bit for bit on every platform.  Streams with
    different ids are independent.

    A stream is single-owner mutable state: never share one across
    threads; give each replicate its own stream.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= stream_id < 2**64:
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = seed
        self.stream_id = stream_id
        key = np.array([seed, stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, k: int) -> "RngStream":
        """Derive an independent sub-stream.

        Children of a stream occupy ids ``16*id + 1 + k`` (k < 15), which is
        collision-free for the shallow trees used here (root id 0, two
        levels of derivation).
        """
        if not 0 <= k < 15:
            raise ValueError(f"child index must be in [0, 15), got {k}")
        return RngStream(self.seed, self.stream_id * 16 + 1 + k)

    def normal(self, size=None, scale: float = 1.0):
        return self._gen.normal(0.0, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def choice(self, n: int, size: int, replace: bool = False):
        return self._gen.choice(n, size=size, replace=replace)


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    return a


def complex_matmul(a, b) -> np.ndarray:
    """Standard matrix product a @ b with an explicit dimension check."""
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def hermitian(a) -> np.ndarray:
    """Conjugate transpose."""
    return _as_matrix(a, "a").conj().T


def trace_gram(w) -> float:
    """tr{W W^H} = sum of squared entry magnitudes (the transmit power of W)."""
    return float(np.sum(np.abs(np.asarray(w)) ** 2))


def sample_complex_gaussian(rng: RngStream, rows: int, cols: int, variance: float) -> np.ndarray:
    """Draw a (rows, cols) matrix of i.i.d. CN(0, variance) entries.

    Real and imaginary parts are independent zero-mean Gaussians with
    variance/2 each, so entry magnitudes are Rayleigh distributed.
    """
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    parts = rng.normal(size=(2, rows, cols), scale=np.sqrt(variance / 2.0))
    return parts[0] + 1j * parts[1]
