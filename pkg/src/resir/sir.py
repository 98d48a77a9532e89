"""Weighted pools and the three resampling schemes.

A pool holds ``N`` proposal draws together with normalized importance
weights and their prefix sums. Resampling maps uniforms through the inverse
CDF of the discrete distribution on the pool: atom ``k`` is chosen for ``u``
when ``cum[k-1] < u <= cum[k]``. The schemes differ only in the uniforms:

* ``sir``       independent uniforms,
* ``anti-sir``  ``u_1..u_m`` followed by ``1-u_1..1-u_m`` (``m = n // 2``),
  plus one independent draw when ``n`` is odd,
* ``lhs-sir``   one uniform in each of ``n`` equal strata of [0, 1).

Pools keep the proposal's draw order; no sorting is applied.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .rng import RngStream, antithetic_uniforms, stratified_uniforms


class DegeneratePoolError(ValueError):
    """Every importance weight is zero."""


class Scheme(enum.Enum):
    PLAIN = "sir"
    ANTITHETIC = "anti-sir"
    LATIN_HYPERCUBE = "lhs-sir"

    @classmethod
    def parse(cls, value: "str | Scheme") -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {value!r}; expected one of {choices}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class WeightedPool:
    samples: np.ndarray          # (N, d)
    log_raw_weights: np.ndarray  # (N,)
    weights: np.ndarray          # (N,)
    cum_weights: np.ndarray      # (N,), last entry exactly 1

    def __len__(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def mean(self) -> np.ndarray:
        """Self-normalized importance sampling estimate of the target mean."""
        return self.weights @ self.samples

    def sorted_by(self, key: np.ndarray) -> "WeightedPool":
        """Same pool with atoms reordered by ``key`` (stable)."""
        order = np.argsort(key, kind="stable")
        return pool_from_log_weights(self.samples[order], self.log_raw_weights[order])


def pool_from_log_weights(samples, log_raw_weights) -> WeightedPool:
    """Normalize log importance weights with a max shift and build a pool."""
    samples = np.array(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    logw = np.array(log_raw_weights, dtype=float).reshape(-1)
    if logw.size < 1:
        raise ValueError("a pool needs at least one sample")
    if logw.size != samples.shape[0]:
        raise ValueError("one log weight per sample is required")
    bad = np.flatnonzero(np.isnan(logw) | (logw == np.inf))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"invalid log weight {logw[i]} at sample {i}: {samples[i].tolist()}")
    if np.all(logw == -np.inf):
        raise DegeneratePoolError("all importance weights are zero; target misses every draw")
    w = np.exp(logw - logsumexp(logw))
    w /= w.sum()
    cum = np.cumsum(w)
    cum[-1] = 1.0
    # renormalizing can leave cum slightly above 1 just before the end
    np.minimum(cum, 1.0, out=cum)
    for arr in (samples, logw, w, cum):
        arr.flags.writeable = False
    return WeightedPool(samples, logw, w, cum)


def build_pool(target, proposal, N: int, stream: RngStream) -> WeightedPool:
    """Draw ``N`` points from ``proposal`` and weight them by ``p / g``."""
    if target.dim != proposal.dim:
        raise ValueError(f"target dim {target.dim} != proposal dim {proposal.dim}")
    if N < 1:
        raise ValueError("N must be at least 1")
    x = proposal.draw(stream, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.asarray(target.log_density(x), dtype=float)
        logg = np.asarray(proposal.log_density(x), dtype=float)
    if np.any(np.isnan(logp)) or np.any(np.isnan(logg)):
        i = int(np.flatnonzero(np.isnan(logp) | np.isnan(logg))[0])
        raise ValueError(f"density evaluated to NaN at sample {i}: {x[i].tolist()}")
    return pool_from_log_weights(x, logp - logg)


def inverse_cdf_index(pool: WeightedPool, u):
    """Zero-based index of the smallest ``k`` with ``u <= cum[k]``.

    ``u == 0`` skips leading zero-weight atoms so they are never selected.
    """
    u_arr = np.asarray(u, dtype=float)
    idx = np.searchsorted(pool.cum_weights, u_arr, side="left")
    if np.any(u_arr <= 0):
        first = np.searchsorted(pool.cum_weights, 0.0, side="right")
        idx = np.where(u_arr <= 0, first, idx)
    idx = np.minimum(idx, len(pool) - 1)
    return int(idx) if np.ndim(idx) == 0 else idx


def linear_scan_index(cum_weights, u: float) -> int:
    """Reference lookup walking the prefix sums."""
    for k, c in enumerate(cum_weights):
        if u <= c:
            return k
    return len(cum_weights) - 1


def plain_uniforms(stream: RngStream, n: int) -> np.ndarray:
    return stream.uniforms(n)


def antithetic_scheme_uniforms(stream: RngStream, n: int) -> np.ndarray:
    u = antithetic_uniforms(stream, n // 2)
    if n % 2:
        u = np.append(u, stream.uniforms(1))
    return u


def scheme_uniforms(scheme: Scheme | str, stream: RngStream, n: int) -> np.ndarray:
    """The ``n`` uniforms a scheme feeds through the inverse CDF."""
    if n < 1:
        raise ValueError("resample size n must be at least 1")
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.PLAIN:
        return plain_uniforms(stream, n)
    if scheme is Scheme.ANTITHETIC:
        return antithetic_scheme_uniforms(stream, n)
    return stratified_uniforms(stream, n)


def resample_indices(pool: WeightedPool, n: int, scheme: Scheme | str, stream: RngStream,
                     shuffle: bool = False) -> np.ndarray:
    idx = inverse_cdf_index(pool, scheme_uniforms(scheme, stream, n))
    if shuffle:
        idx = idx[np.argsort(stream.uniforms(n), kind="stable")]
    return idx


def resample(pool: WeightedPool, n: int, scheme: Scheme | str, stream: RngStream,
             shuffle: bool = False) -> np.ndarray:
    """Resample ``n`` points; ``shuffle`` permutes the output order afterwards."""
    return pool.samples[resample_indices(pool, n, scheme, stream, shuffle)]


def resample_plain(pool: WeightedPool, n: int, stream: RngStream) -> np.ndarray:
    return resample(pool, n, Scheme.PLAIN, stream)


def resample_antithetic(pool: WeightedPool, n: int, stream: RngStream) -> np.ndarray:
    """Outputs ``i`` and ``n//2 + i`` are antithetic partners."""
    return resample(pool, n, Scheme.ANTITHETIC, stream)


def resample_lhs(pool: WeightedPool, n: int, stream: RngStream,
                 shuffle: bool = False) -> np.ndarray:
    """Stratum order gives a nondecreasing index sequence unless ``shuffle``."""
    return resample(pool, n, Scheme.LATIN_HYPERCUBE, stream, shuffle)


def effective_sample_size(pool: WeightedPool) -> float:
    return float(1.0 / np.sum(pool.weights**2))
