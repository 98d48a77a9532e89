"""Seedable uniform streams and the structured uniforms used by resampling.

Streams are backed by numpy's PCG64 bit generator (period 2**128). The
master stream for seed ``s`` is seeded from ``SeedSequence(s)``; the stream
for replicate ``k`` from ``SeedSequence(s, spawn_key=(k,))``, which is what
``SeedSequence(s).spawn`` would hand out as its ``k``-th child. SeedSequence
hashes entropy and spawn key together, so child streams are statistically
independent and each replicate can be re-run on its own.
"""
from __future__ import annotations

import numpy as np

SEED_MAX = 2**64 - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


class RngStream:
    """Single-owner mutable uniform stream.

    All uniforms are 53-bit doubles in [0, 1).
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = _check_seed(seed)
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key))
        )

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"

    def child(self, k: int) -> "RngStream":
        """Stream for replicate ``k``; depends only on (seed, key, k)."""
        if k < 0:
            raise ValueError("child index must be non-negative")
        return RngStream(self.seed, (*self.key, k))

    def uniforms(self, size: int | tuple[int, ...]) -> np.ndarray:
        return self._gen.random(size)

    def normals(self, size: int | tuple[int, ...]) -> np.ndarray:
        return self._gen.standard_normal(size)

    def get_state(self) -> dict:
        return self._gen.bit_generator.state

    def set_state(self, state: dict) -> None:
        self._gen.bit_generator.state = state


def child_stream(seed: int, k: int) -> RngStream:
    return RngStream(seed, (k,))


def next_uniform(stream: RngStream) -> float:
    return float(stream.uniforms(1)[0])


def antithetic_uniforms(stream: RngStream, m: int) -> np.ndarray:
    """Return ``(u_1..u_m, 1-u_1..1-u_m)``; empty for ``m == 0``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    u = stream.uniforms(m)
    return np.concatenate([u, 1.0 - u])


def stratified_uniforms(stream: RngStream, n: int) -> np.ndarray:
    """One uniform per stratum ``[(i-1)/n, i/n)``, in stratum order."""
    if n < 1:
        raise ValueError("stratified_uniforms needs at least one stratum")
    lower = np.arange(n) / n
    v = lower + stream.uniforms(n) / n
    # rounding can push (i-1)/n + w/n onto the next stratum's lower edge
    upper = np.arange(1, n + 1) / n
    return np.minimum(v, np.nextafter(upper, -np.inf))
