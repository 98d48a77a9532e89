"""Replicated mean estimation and MSE summaries for the resampling schemes."""
from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field

import numpy as np

from .densities import parse_distribution
from .parallel import map_replicates
from .rng import child_stream
from .sir import Scheme, build_pool, resample

# univariate (target, proposal) benchmark cells
UNIVARIATE_CELLS = [
    ("beta(2,3)", "unif(0,1)"),
    ("beta(0.9,0.9)", "unif(0,1)"),
    ("norm(0,1)", "logistic(0,1)"),
    ("norm(0,1)", "cauchy(0,1)"),
    ("t(2,0,1)", "cauchy(0,1)"),
    ("f(10,6)", "invgauss(1,1)"),
]
KOTZ_CELL = ("kotz(4d)", "mvnorm(4d)")


class ReplicateError(RuntimeError):
    def __init__(self, k: int, cause: Exception):
        super().__init__(f"replicate {k}: {cause}")
        self.k = k
        self.cause = cause


@dataclass(frozen=True)
class ExperimentConfig:
    target: object
    proposal: object
    N: int
    n: int
    K: int
    scheme: Scheme = Scheme.PLAIN
    seed: int = 0
    true_mean: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if isinstance(self.target, str):
            object.__setattr__(self, "target", parse_distribution(self.target))
        if isinstance(self.proposal, str):
            object.__setattr__(self, "proposal", parse_distribution(self.proposal))
        if not self.N >= self.n >= 1:
            raise ValueError(f"need N >= n >= 1, got N={self.N}, n={self.n}")
        if self.K < 1:
            raise ValueError(f"K must be at least 1, got {self.K}")
        if self.target.dim != self.proposal.dim:
            raise ValueError("target and proposal dimensions differ")

    @property
    def dim(self) -> int:
        return self.target.dim


@dataclass
class BenchReport:
    scheme: Scheme
    estimates: np.ndarray   # (K, d)
    mse: np.ndarray         # (d,)
    omse: float
    wall_time: float
    center: str = "grand-mean"
    extra: dict = field(default_factory=dict)


def estimate_mean(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] == 0:
        raise ValueError("cannot average an empty sample")
    return pts.mean(axis=0)


def mse(estimates, center=None) -> np.ndarray:
    """Per-component mean squared deviation of the ``K`` estimates.

    ``center`` defaults to the grand mean of the estimates.
    """
    est = np.asarray(estimates, dtype=float)
    if est.ndim == 1:
        est = est[:, None]
    if est.shape[0] < 1:
        raise ValueError("need at least one estimate")
    c = est.mean(axis=0) if center is None else np.asarray(center, dtype=float).reshape(-1)
    if c.size != est.shape[1]:
        raise ValueError(f"center has dimension {c.size}, estimates have {est.shape[1]}")
    return np.mean((est - c) ** 2, axis=0)


def omse(mse_vec) -> float:
    return float(np.sum(mse_vec))


def _one_replicate(config: ExperimentConfig, k: int) -> np.ndarray:
    stream = child_stream(config.seed, k)
    try:
        pool = build_pool(config.target, config.proposal, config.N, stream)
    except ValueError as exc:
        raise ReplicateError(k, exc) from exc
    return estimate_mean(resample(pool, config.n, config.scheme, stream))


def run_replications(config: ExperimentConfig, workers: int | None = 1) -> np.ndarray:
    """``(K, d)`` array of per-replicate mean estimates.

    Replicate ``k`` uses ``child_stream(seed, k)`` for both the pool and the
    resampling, so it is reproducible in isolation.
    """
    fn = functools.partial(_one_replicate, config)
    return np.vstack(map_replicates(fn, config.K, workers))


def _replicate_all_schemes(config: ExperimentConfig, schemes: tuple[Scheme, ...], k: int):
    stream = child_stream(config.seed, k)
    t0 = time.perf_counter()
    try:
        pool = build_pool(config.target, config.proposal, config.N, stream)
    except ValueError as exc:
        raise ReplicateError(k, exc) from exc
    pool_time = time.perf_counter() - t0
    state = stream.get_state()
    means, times = [], []
    for scheme in schemes:
        stream.set_state(state)
        t0 = time.perf_counter()
        means.append(estimate_mean(resample(pool, config.n, scheme, stream)))
        times.append(pool_time + time.perf_counter() - t0)
    return means, times


def compare_schemes(config: ExperimentConfig, schemes, workers: int | None = 1):
    """Estimates for several schemes sharing each replicate's pool.

    The stream state after the pool build is replayed for every scheme, so
    ``result[s]`` equals ``run_replications`` with ``scheme=s`` exactly.
    Returns ``({scheme: (K, d) estimates}, {scheme: seconds})``.
    """
    schemes = tuple(Scheme.parse(s) for s in schemes)
    fn = functools.partial(_replicate_all_schemes, config, schemes)
    rows = map_replicates(fn, config.K, workers)
    estimates = {s: np.vstack([r[0][j] for r in rows]) for j, s in enumerate(schemes)}
    times = {s: float(sum(r[1][j] for r in rows)) for j, s in enumerate(schemes)}
    return estimates, times


def bench(config: ExperimentConfig, schemes=tuple(Scheme), use_true_mean: bool = False,
          workers: int | None = 1) -> list[BenchReport]:
    """One :class:`BenchReport` per scheme for the config's target/proposal."""
    center = None
    if use_true_mean:
        center = config.true_mean if config.true_mean is not None else config.target.mean
        if center is None:
            raise ValueError(f"{config.target.code} has no finite mean to centre on")
    estimates, times = compare_schemes(config, schemes, workers)
    reports = []
    for scheme, est in estimates.items():
        m = mse(est, center)
        reports.append(
            BenchReport(
                scheme=scheme,
                estimates=est,
                mse=m,
                omse=omse(m),
                wall_time=times[scheme],
                center="true-mean" if center is not None else "grand-mean",
                extra={"heavy_tailed": bool(getattr(config.target, "heavy_tailed", False))},
            )
        )
    return reports
