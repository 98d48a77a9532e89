"""Bayesian single change-point model for yearly Poisson counts.

Years ``1..theta`` have rate ``lambda1`` and years ``theta+1..T`` have rate
``lambda2``. Priors are used as SIR proposals, so each prior draw's
unnormalized log weight is just the Poisson log likelihood. Gamma
distributions use the shape-rate convention: ``Gamma(3, a)`` has mean
``3 / a``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .parallel import map_replicates
from .rng import RngStream, child_stream
from .sir import Scheme, WeightedPool, pool_from_log_weights, resample_indices

PARAM_NAMES = ("theta", "lambda1", "lambda2")
ALPHA_LOW, ALPHA_HIGH = 1.0 / 8.0, 2.0


@dataclass(frozen=True)
class DisasterSeries:
    counts: np.ndarray
    first_year: int = 1851

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size < 2:
            raise ValueError("a series needs at least two years of counts")
        if not np.all(counts == np.round(counts)) or np.any(counts < 0):
            raise ValueError("counts must be nonnegative integers")
        counts = counts.astype(np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return self.counts.size

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.first_year + len(self))

    @property
    def max_theta(self) -> int:
        return len(self) - 1


@dataclass(frozen=True)
class Case1Hyper:
    a1: float
    a2: float


@dataclass(frozen=True)
class Case2Hyper:
    a: float
    alpha: float


@dataclass(frozen=True)
class ChangePointParams:
    theta: int
    lambda1: float
    lambda2: float
    hyper: Case1Hyper | Case2Hyper | None = None

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError(f"theta must be >= 1, got {self.theta}")
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ValueError("rates must be positive")
        if isinstance(self.hyper, Case2Hyper):
            if not ALPHA_LOW <= self.hyper.alpha <= ALPHA_HIGH:
                raise ValueError(f"alpha {self.hyper.alpha} outside [1/8, 2]")
            if self.lambda2 != self.hyper.alpha * self.lambda1:
                raise ValueError("case 2 requires lambda2 == alpha * lambda1")


@dataclass(frozen=True)
class ChangePointSample:
    """A batch of parameter draws stored column-wise.

    ``hyper`` maps hyperparameter names (``a1``/``a2`` or ``a``/``alpha``)
    to arrays; it is empty for grid priors.
    """

    theta: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    case: int | None = None
    hyper: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.theta.size

    def __getitem__(self, i: int) -> ChangePointParams:
        h = None
        if self.case == 1:
            h = Case1Hyper(float(self.hyper["a1"][i]), float(self.hyper["a2"][i]))
        elif self.case == 2:
            h = Case2Hyper(float(self.hyper["a"][i]), float(self.hyper["alpha"][i]))
        return ChangePointParams(int(self.theta[i]), float(self.lambda1[i]),
                                 float(self.lambda2[i]), h)

    def hyper_names(self) -> tuple[str, ...]:
        return tuple(self.hyper)

    def to_matrix(self) -> np.ndarray:
        cols = [self.theta, self.lambda1, self.lambda2, *self.hyper.values()]
        return np.column_stack([np.asarray(c, dtype=float) for c in cols])

    @classmethod
    def from_matrix(cls, mat: np.ndarray, case: int | None, names: tuple[str, ...]):
        hyper = {name: mat[:, 3 + j] for j, name in enumerate(names)}
        return cls(mat[:, 0].astype(np.int64), mat[:, 1], mat[:, 2], case, hyper)

    def means(self) -> np.ndarray:
        return np.array([self.theta.mean(), self.lambda1.mean(), self.lambda2.mean()])


# -- likelihood ------------------------------------------------------------

def log_likelihood_batch(theta, lambda1, lambda2, data: DisasterSeries) -> np.ndarray:
    """Poisson log likelihood without the ``sum log(x_i!)`` constant."""
    theta = np.asarray(theta, dtype=np.int64)
    lambda1 = np.asarray(lambda1, dtype=float)
    lambda2 = np.asarray(lambda2, dtype=float)
    if np.any(theta < 1) or np.any(theta > data.max_theta):
        raise ValueError(f"theta must lie in 1..{data.max_theta}")
    prefix = np.cumsum(data.counts)
    total = prefix[-1]
    s1 = prefix[theta - 1]
    T = len(data)
    return s1 * np.log(lambda1) - theta * lambda1 + (total - s1) * np.log(lambda2) - (T - theta) * lambda2


def log_likelihood(params: ChangePointParams, data: DisasterSeries) -> float:
    return float(log_likelihood_batch(params.theta, params.lambda1, params.lambda2, data))


# -- gamma sampling ----------------------------------------------------------

def standard_gamma(shape: float, stream: RngStream, size: int) -> np.ndarray:
    """Marsaglia-Tsang (2000) squeeze sampler, vectorized over ``size``.

    Shapes below one use the ``Gamma(shape + 1) * U**(1/shape)`` boost.
    """
    if shape <= 0:
        raise ValueError("gamma shape must be positive")
    if shape < 1:
        g = standard_gamma(shape + 1.0, stream, size)
        return g * stream.uniforms(size) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        m = pending.size
        x = stream.normals(m)
        u = stream.uniforms(m)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            logv = np.log(np.where(ok, v, 1.0))
            accept = ok & (
                (u < 1.0 - 0.0331 * x**4)
                | (np.log(u) < 0.5 * x * x + d * (1.0 - v + logv))
            )
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    return out


def gamma_rate(shape: float, rate, stream: RngStream, size: int) -> np.ndarray:
    return standard_gamma(shape, stream, size) / rate


def draw_theta(stream: RngStream, size: int, max_theta: int = 111) -> np.ndarray:
    u = stream.uniforms(size)
    return np.minimum(np.floor(max_theta * u).astype(np.int64) + 1, max_theta)


# -- priors ------------------------------------------------------------------

@dataclass(frozen=True)
class Case1Prior:
    """theta ~ U{1..T-1}; a_i ~ Gamma(10, 10); lambda_i | a_i ~ Gamma(3, a_i)."""

    max_theta: int = 111
    case = 1

    def draw(self, stream: RngStream, size: int) -> ChangePointSample:
        theta = draw_theta(stream, size, self.max_theta)
        a1 = gamma_rate(10.0, 10.0, stream, size)
        a2 = gamma_rate(10.0, 10.0, stream, size)
        lam1 = gamma_rate(3.0, a1, stream, size)
        lam2 = gamma_rate(3.0, a2, stream, size)
        return ChangePointSample(theta, lam1, lam2, 1, {"a1": a1, "a2": a2})


@dataclass(frozen=True)
class Case2Prior:
    """theta ~ U{1..T-1}; a ~ Gamma(10, 10); lambda1 | a ~ Gamma(3, a);
    log alpha ~ U(log 1/8, log 2); lambda2 = alpha * lambda1."""

    max_theta: int = 111
    case = 2

    def draw(self, stream: RngStream, size: int) -> ChangePointSample:
        theta = draw_theta(stream, size, self.max_theta)
        a = gamma_rate(10.0, 10.0, stream, size)
        lam1 = gamma_rate(3.0, a, stream, size)
        lo, hi = np.log(ALPHA_LOW), np.log(ALPHA_HIGH)
        alpha = np.clip(np.exp(lo + (hi - lo) * stream.uniforms(size)), ALPHA_LOW, ALPHA_HIGH)
        lam2 = alpha * lam1
        return ChangePointSample(theta, lam1, lam2, 2, {"a": a, "alpha": alpha})


@dataclass(frozen=True)
class GridPrior:
    """Discrete prior on a finite set of (theta, lambda1, lambda2) atoms."""

    theta: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    probs: np.ndarray
    case = None

    def draw(self, stream: RngStream, size: int) -> ChangePointSample:
        cum = np.cumsum(np.asarray(self.probs, dtype=float))
        cum /= cum[-1]
        idx = np.minimum(np.searchsorted(cum, stream.uniforms(size), side="right"), cum.size - 1)
        return ChangePointSample(np.asarray(self.theta)[idx].astype(np.int64),
                                 np.asarray(self.lambda1, dtype=float)[idx],
                                 np.asarray(self.lambda2, dtype=float)[idx])


def make_prior(case, max_theta: int = 111):
    if case in (1, "1"):
        return Case1Prior(max_theta)
    if case in (2, "2"):
        return Case2Prior(max_theta)
    if hasattr(case, "draw"):
        return case
    raise ValueError(f"unknown prior case {case!r}; expected 1 or 2")


def sample_prior_case1(stream: RngStream, max_theta: int = 111) -> ChangePointParams:
    return Case1Prior(max_theta).draw(stream, 1)[0]


def sample_prior_case2(stream: RngStream, max_theta: int = 111) -> ChangePointParams:
    return Case2Prior(max_theta).draw(stream, 1)[0]


# -- posterior sampling ------------------------------------------------------

def posterior_pool(data: DisasterSeries, case, N: int, stream: RngStream):
    prior = make_prior(case, data.max_theta)
    draws = prior.draw(stream, N)
    logw = log_likelihood_batch(draws.theta, draws.lambda1, draws.lambda2, data)
    return pool_from_log_weights(draws.to_matrix(), logw), prior.case, draws.hyper_names()


def posterior_sir(data: DisasterSeries, case, scheme: Scheme | str, N: int, n: int,
                  stream: RngStream) -> ChangePointSample:
    """Resample ``n`` posterior draws from ``N`` prior draws weighted by the likelihood."""
    if not N >= n >= 1:
        raise ValueError(f"need N >= n >= 1, got N={N}, n={n}")
    pool, case_id, names = posterior_pool(data, case, N, stream)
    idx = resample_indices(pool, n, scheme, stream)
    return ChangePointSample.from_matrix(pool.samples[idx], case_id, names)


def _replicate(data, case, schemes, N, n, seed, k):
    stream = child_stream(seed, k)
    pool, case_id, names = posterior_pool(data, case, N, stream)
    state = stream.get_state()
    out = []
    for scheme in schemes:
        stream.set_state(state)
        idx = resample_indices(pool, n, scheme, stream)
        theta = pool.samples[idx, 0]
        out.append((pool.samples[idx, :3].mean(axis=0), _mode(theta)))
    return out


def _mode(values: np.ndarray) -> float:
    vals, counts = np.unique(values, return_counts=True)
    return float(vals[np.argmax(counts)])


def run_changepoint(data: DisasterSeries, case, schemes, N: int, n: int, K: int, seed: int,
                    workers: int | None = 1):
    """Per-replicate posterior means for each scheme, sharing each replicate's pool.

    Returns ``{scheme: (K, 3) array of (theta, lambda1, lambda2) means}`` and
    ``{scheme: (K,) array of per-replicate theta modes}``.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not N >= n >= 1:
        raise ValueError(f"need N >= n >= 1, got N={N}, n={n}")
    schemes = tuple(Scheme.parse(s) for s in schemes)
    fn = functools.partial(_replicate, data, case, schemes, N, n, seed)
    rows = map_replicates(fn, K, workers)
    means = {s: np.vstack([r[j][0] for r in rows]) for j, s in enumerate(schemes)}
    modes = {s: np.array([r[j][1] for r in rows]) for j, s in enumerate(schemes)}
    return means, modes


def summarize_means(means) -> dict[str, tuple[float, float]]:
    """Across-replicate mean and population sd (divide by K) per parameter."""
    means = np.asarray(means, dtype=float)
    if means.ndim != 2 or means.shape[0] < 2:
        raise ValueError("a standard deviation needs at least two replications")
    mu = means.mean(axis=0)
    sd = means.std(axis=0, ddof=0)
    return {name: (float(mu[j]), float(sd[j])) for j, name in enumerate(PARAM_NAMES)}


def summarize(runs) -> dict[str, tuple[float, float]]:
    """Summarize ``K`` posterior samples by the spread of their per-run means."""
    if len(runs) < 2:
        raise ValueError("a standard deviation needs at least two replications")
    return summarize_means(np.vstack([r.means() for r in runs]))


def theta_mode(modes) -> float:
    return _mode(np.asarray(modes))


def exact_posterior(prior: GridPrior, data: DisasterSeries) -> np.ndarray:
    """Posterior probabilities of a grid prior's atoms by enumeration."""
    logp = np.log(np.asarray(prior.probs, dtype=float)) + log_likelihood_batch(
        prior.theta, prior.lambda1, prior.lambda2, data)
    p = np.exp(logp - logp.max())
    return p / p.sum()
