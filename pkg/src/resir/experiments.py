"""Experiment drivers behind the command line."""
from __future__ import annotations

import datetime as _dt
import time

import numpy as np
from scipy import stats

from . import __version__
from .bench import ExperimentConfig, bench
from .changepoint import (PARAM_NAMES, posterior_sir, run_changepoint, summarize_means,
                          theta_mode)
from .config import RunConfig
from .datasets import load_disaster_data
from .densities import parse_distribution
from .report import ReportFile, theta_histogram
from .rng import child_stream
from .sir import build_pool, effective_sample_size, resample


def _metadata(cfg: RunConfig) -> dict:
    return {
        "tool": "resir",
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "seed": cfg.seed,
        "config": cfg.to_ini(),
    }


def run_bench(cfg: RunConfig, workers: int | None = None) -> ReportFile:
    N, n, K = cfg.sizes()
    rows, timings = [], {}
    dim = None
    for target, proposal in cfg.cells():
        ec = ExperimentConfig(target, proposal, N, n, K, seed=cfg.seed)
        dim = ec.dim if dim is None else max(dim, ec.dim)
        for rep in bench(ec, cfg.schemes, use_true_mean=cfg.center == "true-mean", workers=workers):
            row = {"target": ec.target.code, "proposal": ec.proposal.code,
                   "scheme": rep.scheme.value}
            row.update({f"mse_{j + 1}": float(v) for j, v in enumerate(rep.mse)})
            row["omse"] = rep.omse
            row["center"] = rep.center
            row["heavy_tailed"] = rep.extra["heavy_tailed"]
            rows.append(row)
            timings[f"{row['target']}|{row['proposal']}|{row['scheme']}"] = rep.wall_time
    columns = ["target", "proposal", "scheme", *[f"mse_{j + 1}" for j in range(dim)],
               "omse", "center", "heavy_tailed"]
    meta = _metadata(cfg)
    meta.update({"N": N, "n": n, "K": K, "wall_time_seconds": timings})
    return ReportFile(cfg.experiment, columns, rows, meta)


def run_changepoint_experiment(cfg: RunConfig, workers: int | None = None) -> ReportFile:
    N, n, K = cfg.sizes()
    data = load_disaster_data(cfg.data)
    rows, timings = [], {}
    columns = ["case", "scheme"]
    for name in PARAM_NAMES:
        columns += [f"{name}_mean", f"{name}_sd"]
    columns.append("theta_mode")
    for case in cfg.cases():
        t0 = time.perf_counter()
        means, modes = run_changepoint(data, case, cfg.schemes, N, n, K, cfg.seed, workers)
        timings[f"case{case}"] = time.perf_counter() - t0
        for scheme in cfg.schemes:
            row = {"case": case, "scheme": scheme.value}
            if K >= 2:
                for name, (mu, sd) in summarize_means(means[scheme]).items():
                    row[f"{name}_mean"], row[f"{name}_sd"] = mu, sd
            else:
                for j, name in enumerate(PARAM_NAMES):
                    row[f"{name}_mean"], row[f"{name}_sd"] = float(means[scheme][0, j]), None
            row["theta_mode"] = theta_mode(modes[scheme])
            rows.append(row)
    first_case, first_scheme = cfg.cases()[0], cfg.schemes[0]
    draws = posterior_sir(data, first_case, first_scheme, N, n, child_stream(cfg.seed, 0))
    meta = _metadata(cfg)
    meta.update({"N": N, "n": n, "K": K, "sd_convention": "population (divide by K)",
                 "wall_time_seconds": timings})
    plot = {"theta_histogram": theta_histogram(draws.theta), "series": data}
    return ReportFile(cfg.experiment, columns, rows, meta, plot)


def run_convergence(cfg: RunConfig, workers: int | None = None) -> ReportFile:
    N, n, K = cfg.sizes()
    pool_sizes = cfg.pool_sizes or (N,)
    rows = []
    for target_code, proposal_code in cfg.cells():
        target = parse_distribution(target_code)
        proposal = parse_distribution(proposal_code)
        if not hasattr(target, "cdf"):
            raise ValueError(f"convergence-check needs a 1-d target with a CDF, got {target.code}")
        for pool_size in pool_sizes:
            if n > pool_size:
                raise ValueError(f"resample size n={n} exceeds pool size {pool_size}")
            for scheme in cfg.schemes:
                ks, ess = [], []
                for k in range(K):
                    stream = child_stream(cfg.seed, k)
                    pool = build_pool(target, proposal, pool_size, stream)
                    x = resample(pool, n, scheme, stream)[:, 0]
                    ks.append(stats.kstest(x, target.cdf).statistic)
                    ess.append(effective_sample_size(pool))
                rows.append({"target": target.code, "proposal": proposal.code, "N": pool_size,
                             "n": n, "scheme": scheme.value, "ks": float(np.mean(ks)),
                             "ess": float(np.mean(ess)),
                             "ess_fraction": float(np.mean(ess)) / pool_size})
    columns = ["target", "proposal", "N", "n", "scheme", "ks", "ess", "ess_fraction"]
    meta = _metadata(cfg)
    meta.update({"K": K})
    return ReportFile(cfg.experiment, columns, rows, meta)


def run(cfg: RunConfig, workers: int | None = None) -> ReportFile:
    if cfg.experiment in ("bench-univariate", "bench-kotz"):
        return run_bench(cfg, workers)
    if cfg.experiment == "changepoint":
        return run_changepoint_experiment(cfg, workers)
    if cfg.experiment == "convergence-check":
        return run_convergence(cfg, workers)
    raise ValueError(f"unknown experiment {cfg.experiment!r}")
